//! Terms, negation-normal-form statements, duality, substitution, instances,
//! and literal occurrences.
//!
//! Statements are NNF syntax trees: negation appears on atoms only, and
//! disjunction/conjunction range over finite *ordered* child sequences, so
//! `Or(vec![])` plays the role of `false` and `And(vec![])` the role of
//! `true`. All values here are immutable after construction and cheap to
//! share across threads; every operation is a pure function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// The reserved identity symbol. It is built into the logic and may not be
/// declared as a vocabulary predicate.
pub const IDENTITY_SYMBOL: &str = "≐";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("the identity symbol `{IDENTITY_SYMBOL}` cannot be declared in a vocabulary")]
    ReservedIdentity,
    #[error("symbol `{0}` declared twice with different arities ({1} vs {2})")]
    ArityClash(String, usize, usize),
    #[error("unknown {kind} symbol `{name}`")]
    UnknownSymbol { kind: &'static str, name: String },
    #[error("symbol `{name}` used with arity {used}, declared with arity {declared}")]
    ArityMismatch {
        name: String,
        used: usize,
        declared: usize,
    },
    #[error("substitution binds variable v{0} to an open term")]
    OpenSubstitutionTerm(usize),
    #[error("quantifier binds v{0} which does not occur free in its body")]
    VacuousQuantifier(usize),
    #[error("path {0:?} does not address a literal occurrence")]
    InvalidPath(Vec<usize>),
}

/// Function and predicate symbols with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    functions: BTreeMap<String, usize>,
    predicates: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(
        functions: impl IntoIterator<Item = (impl Into<String>, usize)>,
        predicates: impl IntoIterator<Item = (impl Into<String>, usize)>,
    ) -> Result<Self, SyntaxError> {
        let mut v = Self::new();
        for (name, arity) in functions {
            v.declare_function(name, arity)?;
        }
        for (name, arity) in predicates {
            v.declare_predicate(name, arity)?;
        }
        Ok(v)
    }

    pub fn declare_function(
        &mut self,
        name: impl Into<String>,
        arity: usize,
    ) -> Result<(), SyntaxError> {
        let name = name.into();
        if name == IDENTITY_SYMBOL {
            return Err(SyntaxError::ReservedIdentity);
        }
        match self.functions.get(&name) {
            Some(&a) if a != arity => Err(SyntaxError::ArityClash(name, a, arity)),
            _ => {
                self.functions.insert(name, arity);
                Ok(())
            }
        }
    }

    pub fn declare_predicate(
        &mut self,
        name: impl Into<String>,
        arity: usize,
    ) -> Result<(), SyntaxError> {
        let name = name.into();
        if name == IDENTITY_SYMBOL {
            return Err(SyntaxError::ReservedIdentity);
        }
        match self.predicates.get(&name) {
            Some(&a) if a != arity => Err(SyntaxError::ArityClash(name, a, arity)),
            _ => {
                self.predicates.insert(name, arity);
                Ok(())
            }
        }
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn has_constant(&self) -> bool {
        self.functions.values().any(|&a| a == 0)
    }
}

/// A first-order term over a vocabulary: a variable from the fixed
/// enumeration `v0, v1, ...` or a function application (constants are
/// nullary applications).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Self {
        Term::Var(i)
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), vec![])
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    /// The numeral built from `zero` by `n` applications of `succ`.
    pub fn numeral(n: usize, zero: &str, succ: &str) -> Self {
        let mut t = Term::constant(zero);
        for _ in 0..n {
            t = Term::app(succ, vec![t]);
        }
        t
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    /// Constructor nesting depth: variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => match args.iter().map(Term::depth).max() {
                Some(m) => m + 1,
                None => 0,
            },
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::App(_, args) => {
                for a in args {
                    a.vars(out);
                }
            }
        }
    }

    pub fn substitute(&self, subst: &Substitution) -> Term {
        match self {
            Term::Var(i) => subst
                .get(*i)
                .cloned()
                .unwrap_or_else(|| Term::Var(*i)),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(subst)).collect())
            }
        }
    }

    pub fn check(&self, vocab: &Vocabulary) -> Result<(), SyntaxError> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let arity =
                    vocab
                        .function_arity(f)
                        .ok_or_else(|| SyntaxError::UnknownSymbol {
                            kind: "function",
                            name: f.clone(),
                        })?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: f.clone(),
                        used: args.len(),
                        declared: arity,
                    });
                }
                args.iter().try_for_each(|a| a.check(vocab))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "V{i}"),
            Term::App(name, args) => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (k, a) in args.iter().enumerate() {
                        if k > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An atom or its classical negation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal {
            positive: true,
            predicate: predicate.into(),
            args,
        }
    }

    pub fn neg_atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal {
            positive: false,
            predicate: predicate.into(),
            args,
        }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        Literal::atom(predicate, vec![])
    }

    pub fn neg_prop(predicate: impl Into<String>) -> Self {
        Literal::neg_atom(predicate, vec![])
    }

    /// The complementary literal (the `∼` operator on literals).
    pub fn complement(&self) -> Literal {
        Literal {
            positive: !self.positive,
            predicate: self.predicate.clone(),
            args: self.args.clone(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.args.iter().all(Term::is_closed)
    }

    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for a in &self.args {
            a.vars(&mut out);
        }
        out
    }

    pub fn substitute(&self, subst: &Substitution) -> Literal {
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.substitute(subst)).collect(),
        }
    }

    pub fn to_statement(&self) -> Statement {
        if self.positive {
            Statement::Atom(self.predicate.clone(), self.args.clone())
        } else {
            Statement::NegAtom(self.predicate.clone(), self.args.clone())
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "-")?;
        }
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (k, a) in self.args.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A statement in negation normal form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    Atom(String, Vec<Term>),
    NegAtom(String, Vec<Term>),
    Identity(Term, Term),
    Distinction(Term, Term),
    Or(Vec<Statement>),
    And(Vec<Statement>),
    Exists(usize, Box<Statement>),
    Forall(usize, Box<Statement>),
}

impl Statement {
    pub fn truth() -> Self {
        Statement::And(vec![])
    }

    pub fn falsity() -> Self {
        Statement::Or(vec![])
    }

    pub fn lit(l: &Literal) -> Self {
        l.to_statement()
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Statement::Atom(..) | Statement::NegAtom(..))
    }

    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Statement::Atom(p, args) => Some(Literal::atom(p.clone(), args.clone())),
            Statement::NegAtom(p, args) => Some(Literal::neg_atom(p.clone(), args.clone())),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Validates arities against the vocabulary and the condition that every
    /// quantified variable occurs free in its body.
    pub fn check(&self, vocab: &Vocabulary) -> Result<(), SyntaxError> {
        match self {
            Statement::Atom(p, args) | Statement::NegAtom(p, args) => {
                let arity =
                    vocab
                        .predicate_arity(p)
                        .ok_or_else(|| SyntaxError::UnknownSymbol {
                            kind: "predicate",
                            name: p.clone(),
                        })?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: p.clone(),
                        used: args.len(),
                        declared: arity,
                    });
                }
                args.iter().try_for_each(|a| a.check(vocab))
            }
            Statement::Identity(a, b) | Statement::Distinction(a, b) => {
                a.check(vocab)?;
                b.check(vocab)
            }
            Statement::Or(children) | Statement::And(children) => {
                children.iter().try_for_each(|c| c.check(vocab))
            }
            Statement::Exists(x, body) | Statement::Forall(x, body) => {
                if !body.free_vars().contains(x) {
                    return Err(SyntaxError::VacuousQuantifier(*x));
                }
                body.check(vocab)
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        fn go(s: &Statement, bound: &mut Vec<usize>, out: &mut BTreeSet<usize>) {
            match s {
                Statement::Atom(_, args) | Statement::NegAtom(_, args) => {
                    let mut vars = BTreeSet::new();
                    for a in args {
                        a.vars(&mut vars);
                    }
                    out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
                }
                Statement::Identity(a, b) | Statement::Distinction(a, b) => {
                    let mut vars = BTreeSet::new();
                    a.vars(&mut vars);
                    b.vars(&mut vars);
                    out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
                }
                Statement::Or(children) | Statement::And(children) => {
                    for c in children {
                        go(c, bound, out);
                    }
                }
                Statement::Exists(x, body) | Statement::Forall(x, body) => {
                    bound.push(*x);
                    go(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// The `∼` operator: swaps Or/And, Exists/Forall, Atom/NegAtom and
    /// Identity/Distinction, recursively. An involution.
    pub fn dual(&self) -> Statement {
        match self {
            Statement::Atom(p, args) => Statement::NegAtom(p.clone(), args.clone()),
            Statement::NegAtom(p, args) => Statement::Atom(p.clone(), args.clone()),
            Statement::Identity(a, b) => Statement::Distinction(a.clone(), b.clone()),
            Statement::Distinction(a, b) => Statement::Identity(a.clone(), b.clone()),
            Statement::Or(children) => Statement::And(children.iter().map(Statement::dual).collect()),
            Statement::And(children) => Statement::Or(children.iter().map(Statement::dual).collect()),
            Statement::Exists(x, body) => Statement::Forall(*x, Box::new(body.dual())),
            Statement::Forall(x, body) => Statement::Exists(*x, Box::new(body.dual())),
        }
    }

    /// Enumerates all literal leaves with their paths, in left-to-right
    /// order. Identities and distinctions are not literal occurrences.
    pub fn occurrences(&self) -> Vec<(OccurrencePath, Literal)> {
        fn go(s: &Statement, prefix: &mut Vec<usize>, out: &mut Vec<(OccurrencePath, Literal)>) {
            match s {
                Statement::Atom(..) | Statement::NegAtom(..) => out.push((
                    OccurrencePath(prefix.clone()),
                    s.as_literal().expect("literal"),
                )),
                Statement::Identity(..) | Statement::Distinction(..) => {}
                Statement::Or(children) | Statement::And(children) => {
                    for (i, c) in children.iter().enumerate() {
                        prefix.push(i);
                        go(c, prefix, out);
                        prefix.pop();
                    }
                }
                Statement::Exists(_, body) | Statement::Forall(_, body) => {
                    prefix.push(0);
                    go(body, prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// The subtree addressed by `path`, if the path is valid.
    pub fn at_path(&self, path: &OccurrencePath) -> Option<&Statement> {
        let mut node = self;
        for &i in &path.0 {
            node = match node {
                Statement::Or(children) | Statement::And(children) => children.get(i)?,
                Statement::Exists(_, body) | Statement::Forall(_, body) if i == 0 => body,
                _ => return None,
            };
        }
        Some(node)
    }

    /// The literal at `path`, when the path addresses a literal leaf.
    pub fn literal_at(&self, path: &OccurrencePath) -> Option<Literal> {
        self.at_path(path).and_then(Statement::as_literal)
    }

    /// Simultaneous replacement of free occurrences by closed terms; bound
    /// occurrences are untouched. Capture cannot arise because every
    /// replacement term is closed.
    pub fn substitute(&self, subst: &Substitution) -> Statement {
        match self {
            Statement::Atom(p, args) => Statement::Atom(
                p.clone(),
                args.iter().map(|a| a.substitute(subst)).collect(),
            ),
            Statement::NegAtom(p, args) => Statement::NegAtom(
                p.clone(),
                args.iter().map(|a| a.substitute(subst)).collect(),
            ),
            Statement::Identity(a, b) => {
                Statement::Identity(a.substitute(subst), b.substitute(subst))
            }
            Statement::Distinction(a, b) => {
                Statement::Distinction(a.substitute(subst), b.substitute(subst))
            }
            Statement::Or(children) => {
                Statement::Or(children.iter().map(|c| c.substitute(subst)).collect())
            }
            Statement::And(children) => {
                Statement::And(children.iter().map(|c| c.substitute(subst)).collect())
            }
            Statement::Exists(x, body) => {
                let inner = subst.without(*x);
                Statement::Exists(*x, Box::new(body.substitute(&inner)))
            }
            Statement::Forall(x, body) => {
                let inner = subst.without(*x);
                Statement::Forall(*x, Box::new(body.substitute(&inner)))
            }
        }
    }
}

fn fmt_children(
    f: &mut fmt::Formatter<'_>,
    children: &[Statement],
    sep: &str,
    parenthesize_or: bool,
) -> fmt::Result {
    for (k, c) in children.iter().enumerate() {
        if k > 0 {
            write!(f, "{sep}")?;
        }
        let needs_parens = parenthesize_or && matches!(c, Statement::Or(v) if v.len() > 1);
        if needs_parens {
            write!(f, "({c})")?;
        } else {
            write!(f, "{c}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Atom(..) | Statement::NegAtom(..) => {
                write!(f, "{}", self.as_literal().expect("literal"))
            }
            Statement::Identity(a, b) => write!(f, "{a} = {b}"),
            Statement::Distinction(a, b) => write!(f, "{a} != {b}"),
            Statement::Or(children) if children.is_empty() => write!(f, "false"),
            Statement::And(children) if children.is_empty() => write!(f, "true"),
            Statement::Or(children) => fmt_children(f, children, "; ", false),
            Statement::And(children) => fmt_children(f, children, ", ", true),
            Statement::Exists(x, body) => write!(f, "exists V{x} ({body})"),
            Statement::Forall(x, body) => write!(f, "forall V{x} ({body})"),
        }
    }
}

impl fmt::Debug for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A path of child indices from a statement's root to a literal leaf.
/// Quantifier bodies sit at child index 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OccurrencePath(pub Vec<usize>);

impl OccurrencePath {
    pub fn root() -> Self {
        OccurrencePath(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        OccurrencePath(p)
    }
}

impl fmt::Debug for OccurrencePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<usize>> for OccurrencePath {
    fn from(v: Vec<usize>) -> Self {
        OccurrencePath(v)
    }
}

/// A finite map from variable indices to closed terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<usize, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: usize, term: Term) -> Result<Self, SyntaxError> {
        if !term.is_closed() {
            return Err(SyntaxError::OpenSubstitutionTerm(var));
        }
        self.0.insert(var, term);
        Ok(self)
    }

    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (usize, Term)>,
    ) -> Result<Self, SyntaxError> {
        let mut s = Self::new();
        for (v, t) in pairs {
            s = s.bind(v, t)?;
        }
        Ok(s)
    }

    pub fn get(&self, var: usize) -> Option<&Term> {
        self.0.get(&var)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Term)> {
        self.0.iter().map(|(&v, t)| (v, t))
    }

    fn without(&self, var: usize) -> Substitution {
        let mut m = self.0.clone();
        m.remove(&var);
        Substitution(m)
    }
}

/// First-order matching of a closed term against a pattern. Bindings are
/// accumulated in `witness`; a conflicting rebinding fails the match.
fn match_term(pattern: &Term, closed: &Term, witness: &mut BTreeMap<usize, Term>) -> bool {
    match pattern {
        Term::Var(i) => match witness.get(i) {
            Some(bound) => bound == closed,
            None => {
                witness.insert(*i, closed.clone());
                true
            }
        },
        Term::App(f, args) => match closed {
            Term::App(g, cargs) => {
                f == g
                    && args.len() == cargs.len()
                    && args
                        .iter()
                        .zip(cargs)
                        .all(|(p, c)| match_term(p, c, witness))
            }
            Term::Var(_) => false,
        },
    }
}

/// Matching of statements: `shadowed` holds quantifier-bound variables,
/// which must map to themselves.
fn match_statement(
    pattern: &Statement,
    closed: &Statement,
    shadowed: &mut Vec<usize>,
    witness: &mut BTreeMap<usize, Term>,
) -> bool {
    // Bound variables are rigid: treat a shadowed Var(i) like a constant.
    fn match_term_shadowed(
        p: &Term,
        c: &Term,
        shadowed: &[usize],
        witness: &mut BTreeMap<usize, Term>,
    ) -> bool {
        match p {
            Term::Var(i) if shadowed.contains(i) => c == p,
            Term::Var(i) => match witness.get(i) {
                Some(bound) => bound == c,
                None => {
                    witness.insert(*i, c.clone());
                    true
                }
            },
            Term::App(f, args) => match c {
                Term::App(g, cargs) => {
                    f == g
                        && args.len() == cargs.len()
                        && args
                            .iter()
                            .zip(cargs)
                            .all(|(p, c)| match_term_shadowed(p, c, shadowed, witness))
                }
                Term::Var(_) => false,
            },
        }
    }

    match (pattern, closed) {
        (Statement::Atom(p, args), Statement::Atom(q, cargs))
        | (Statement::NegAtom(p, args), Statement::NegAtom(q, cargs)) => {
            p == q
                && args.len() == cargs.len()
                && args
                    .iter()
                    .zip(cargs)
                    .all(|(a, c)| match_term_shadowed(a, c, shadowed, witness))
        }
        (Statement::Identity(a, b), Statement::Identity(ca, cb))
        | (Statement::Distinction(a, b), Statement::Distinction(ca, cb)) => {
            match_term_shadowed(a, ca, shadowed, witness)
                && match_term_shadowed(b, cb, shadowed, witness)
        }
        (Statement::Or(children), Statement::Or(cchildren))
        | (Statement::And(children), Statement::And(cchildren)) => {
            children.len() == cchildren.len()
                && children
                    .iter()
                    .zip(cchildren)
                    .all(|(p, c)| match_statement(p, c, shadowed, witness))
        }
        (Statement::Exists(x, body), Statement::Exists(y, cbody))
        | (Statement::Forall(x, body), Statement::Forall(y, cbody)) => {
            if x != y {
                return false;
            }
            shadowed.push(*x);
            let ok = match_statement(body, cbody, shadowed, witness);
            shadowed.pop();
            ok
        }
        _ => false,
    }
}

/// True iff the closed term `closed` is an instance of `pattern`.
pub fn term_is_instance(closed: &Term, pattern: &Term) -> bool {
    term_instance_witness(closed, pattern).is_some()
}

/// The matching substitution when `closed` is an instance of `pattern`.
pub fn term_instance_witness(closed: &Term, pattern: &Term) -> Option<Substitution> {
    debug_assert!(closed.is_closed());
    let mut witness = BTreeMap::new();
    match_term(pattern, closed, &mut witness).then(|| Substitution(witness))
}

/// True iff the closed statement `closed` is an instance of `pattern`.
pub fn is_instance(closed: &Statement, pattern: &Statement) -> bool {
    instance_witness(closed, pattern).is_some()
}

/// The (unique) matching substitution when `closed` is an instance of
/// `pattern`.
pub fn instance_witness(closed: &Statement, pattern: &Statement) -> Option<Substitution> {
    debug_assert!(closed.is_closed());
    let mut witness = BTreeMap::new();
    match_statement(pattern, closed, &mut Vec::new(), &mut witness).then(|| Substitution(witness))
}

/// True iff the closed literal is an instance of the (possibly open)
/// pattern literal.
pub fn literal_is_instance(closed: &Literal, pattern: &Literal) -> bool {
    literal_instance_witness(closed, pattern).is_some()
}

pub fn literal_instance_witness(closed: &Literal, pattern: &Literal) -> Option<Substitution> {
    if closed.positive != pattern.positive
        || closed.predicate != pattern.predicate
        || closed.args.len() != pattern.args.len()
    {
        return None;
    }
    let mut witness = BTreeMap::new();
    pattern
        .args
        .iter()
        .zip(&closed.args)
        .all(|(p, c)| match_term(p, c, &mut witness))
        .then(|| Substitution(witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: Vec<Term>) -> Statement {
        Statement::Atom("p".into(), args)
    }

    fn np(args: Vec<Term>) -> Statement {
        Statement::NegAtom("p".into(), args)
    }

    fn num(n: usize) -> Term {
        Term::numeral(n, "0", "s")
    }

    #[test]
    fn dual_of_conjunction_of_disjunctions() {
        // (p(X); -q(X)), (-p(X); r(X))  ~->  (-p(X), q(X)); (p(X), -r(X))
        let x = Term::var(1);
        let phi = Statement::And(vec![
            Statement::Or(vec![
                Statement::Atom("p".into(), vec![x.clone()]),
                Statement::NegAtom("q".into(), vec![x.clone()]),
            ]),
            Statement::Or(vec![
                Statement::NegAtom("p".into(), vec![x.clone()]),
                Statement::Atom("r".into(), vec![x.clone()]),
            ]),
        ]);
        let expected = Statement::Or(vec![
            Statement::And(vec![
                Statement::NegAtom("p".into(), vec![x.clone()]),
                Statement::Atom("q".into(), vec![x.clone()]),
            ]),
            Statement::And(vec![
                Statement::Atom("p".into(), vec![x.clone()]),
                Statement::NegAtom("r".into(), vec![x.clone()]),
            ]),
        ]);
        assert_eq!(phi.dual(), expected);
    }

    #[test]
    fn dual_empty_or_is_empty_and() {
        assert_eq!(Statement::falsity().dual(), Statement::truth());
        assert_eq!(Statement::truth().dual(), Statement::falsity());
    }

    #[test]
    fn dual_exists_is_forall_of_negation() {
        let phi = Statement::Exists(0, Box::new(p(vec![Term::var(0)])));
        let expected = Statement::Forall(0, Box::new(np(vec![Term::var(0)])));
        assert_eq!(phi.dual(), expected);
    }

    #[test]
    fn occurrences_enumerate_literal_leaves_in_order() {
        // And([-p, Or([q, r, -p])]) has occurrences at [0], [1,0], [1,1], [1,2].
        let phi = Statement::And(vec![
            np(vec![]),
            Statement::Or(vec![
                Statement::Atom("q".into(), vec![]),
                Statement::Atom("r".into(), vec![]),
                np(vec![]),
            ]),
        ]);
        let occ = phi.occurrences();
        assert_eq!(occ.len(), 4);
        assert_eq!(occ[0].0, vec![0].into());
        assert_eq!(occ[0].1, Literal::neg_prop("p"));
        assert_eq!(occ[1].0, vec![1, 0].into());
        assert_eq!(occ[1].1, Literal::prop("q"));
        assert_eq!(occ[2].0, vec![1, 1].into());
        assert_eq!(occ[3].0, vec![1, 2].into());
        assert_eq!(occ[3].1, Literal::neg_prop("p"));
    }

    #[test]
    fn occurrences_single_literal_and_identity() {
        assert_eq!(
            p(vec![Term::var(1)]).occurrences(),
            vec![(
                OccurrencePath::root(),
                Literal::atom("p", vec![Term::var(1)])
            )]
        );
        let id = Statement::Identity(num(0), num(1));
        assert!(id.occurrences().is_empty());
    }

    #[test]
    fn substitute_replaces_free_occurrences_only() {
        // (exists V0 p(V0,V1))[0/V0, s(0)/V1] leaves the bound V0 untouched.
        let phi = Statement::Exists(
            0,
            Box::new(Statement::Atom(
                "p".into(),
                vec![Term::var(0), Term::var(1)],
            )),
        );
        let subst = Substitution::from_pairs([(0, num(0)), (1, num(1))]).unwrap();
        let expected = Statement::Exists(
            0,
            Box::new(Statement::Atom("p".into(), vec![Term::var(0), num(1)])),
        );
        assert_eq!(phi.substitute(&subst), expected);
    }

    #[test]
    fn substitute_simple_and_identity_cases() {
        let phi = p(vec![Term::var(1)]);
        let subst = Substitution::from_pairs([(1, num(0))]).unwrap();
        assert_eq!(phi.substitute(&subst), p(vec![num(0)]));

        let id = Statement::Identity(
            Term::var(1),
            Term::app("s", vec![Term::app("s", vec![Term::var(0)])]),
        );
        let subst = Substitution::from_pairs([(1, num(3)), (0, num(1))]).unwrap();
        assert_eq!(
            id.substitute(&subst),
            Statement::Identity(num(3), Term::app("s", vec![Term::app("s", vec![num(1)])]))
        );
    }

    #[test]
    fn substitution_rejects_open_terms() {
        assert_eq!(
            Substitution::new().bind(0, Term::var(1)),
            Err(SyntaxError::OpenSubstitutionTerm(0))
        );
    }

    #[test]
    fn empty_substitution_is_identity() {
        let phi = Statement::Forall(
            2,
            Box::new(Statement::Or(vec![
                p(vec![Term::var(2)]),
                Statement::Identity(Term::var(2), num(1)),
            ])),
        );
        assert_eq!(phi.substitute(&Substitution::new()), phi);
    }

    #[test]
    fn instances_with_witness() {
        let closed = p(vec![num(2)]);
        let pattern = p(vec![Term::var(1)]);
        let w = instance_witness(&closed, &pattern).unwrap();
        assert_eq!(w.get(1), Some(&num(2)));

        let other = Statement::Atom("q".into(), vec![Term::var(1)]);
        assert!(!is_instance(&closed, &other));
    }

    #[test]
    fn tuple_instance_is_componentwise() {
        assert!(term_is_instance(&num(3), &Term::var(1)));
        assert!(term_is_instance(&num(3), &Term::var(2)));
        // Same variable must bind consistently within one matching.
        let pat = Literal::atom("p", vec![Term::var(1), Term::var(1)]);
        assert!(literal_is_instance(
            &Literal::atom("p", vec![num(3), num(3)]),
            &pat
        ));
        assert!(!literal_is_instance(
            &Literal::atom("p", vec![num(3), num(4)]),
            &pat
        ));
    }

    #[test]
    fn every_closed_statement_is_instance_of_itself() {
        let phi = Statement::And(vec![
            p(vec![num(1)]),
            Statement::Exists(0, Box::new(np(vec![Term::var(0)]))),
        ]);
        assert!(is_instance(&phi, &phi));
    }

    #[test]
    fn free_vars_cases() {
        let phi = Statement::And(vec![
            p(vec![Term::var(1)]),
            Statement::Exists(0, Box::new(Statement::Atom("q".into(), vec![Term::var(0)]))),
        ]);
        assert_eq!(phi.free_vars(), BTreeSet::from([1]));
        assert!(Statement::truth().free_vars().is_empty());
        let closed_forall = Statement::Forall(2, Box::new(p(vec![Term::var(2)])));
        assert!(closed_forall.free_vars().is_empty());
    }

    #[test]
    fn vocabulary_rejects_identity_symbol() {
        let mut v = Vocabulary::new();
        assert_eq!(
            v.declare_predicate(IDENTITY_SYMBOL, 2),
            Err(SyntaxError::ReservedIdentity)
        );
        assert_eq!(
            v.declare_function(IDENTITY_SYMBOL, 1),
            Err(SyntaxError::ReservedIdentity)
        );
    }

    #[test]
    fn statement_check_validates_arities_and_quantifiers() {
        let vocab = Vocabulary::with([("0", 0), ("s", 1)], [("p", 1)]).unwrap();
        assert!(p(vec![num(2)]).check(&vocab).is_ok());
        assert!(p(vec![num(1), num(1)]).check(&vocab).is_err());
        let vacuous = Statement::Exists(3, Box::new(p(vec![num(0)])));
        assert_eq!(vacuous.check(&vocab), Err(SyntaxError::VacuousQuantifier(3)));
    }

    #[test]
    fn rendering_follows_the_canonical_format() {
        let x = Term::var(1);
        let phi = Statement::And(vec![
            Statement::Or(vec![
                Statement::Atom("p".into(), vec![x.clone()]),
                Statement::NegAtom("q".into(), vec![x.clone()]),
            ]),
            Statement::Identity(x.clone(), num(2)),
        ]);
        assert_eq!(phi.to_string(), "(p(V1); -q(V1)), V1 = s(s(0))");
        assert_eq!(Statement::truth().to_string(), "true");
        assert_eq!(Statement::falsity().to_string(), "false");
        let ex = Statement::Exists(0, Box::new(np(vec![Term::var(0)])));
        assert_eq!(ex.to_string(), "exists V0 (-p(V0))");
    }
}
