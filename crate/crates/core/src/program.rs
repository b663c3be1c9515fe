//! Formal logic programs, symmetric completion, rule merging, classical
//! logical form, local consistency, and the translation between general
//! programs (with `not`) and marked formal programs.
//!
//! A formal logic program assigns every predicate of its vocabulary exactly
//! one positive and one negative body, with free variables drawn from the
//! head positions `v1..vn`. Surface rules with arbitrary head terms are
//! normalized into this shape by [`merge_rules`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::forcing::{satisfiable_w, ForcingError, GroundContext};
use crate::syntax::{Literal, OccurrencePath, Statement, SyntaxError, Term, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("head of rule for `{predicate}` uses {used} arguments, declared arity is {declared}")]
    HeadArityMismatch {
        predicate: String,
        used: usize,
        declared: usize,
    },
    #[error("body for `{predicate}` has free variable v{var} outside the head frame")]
    FreeVariableEscape { predicate: String, var: usize },
    #[error("rule head uses undeclared predicate `{0}`")]
    UnknownPredicate(String),
    #[error("marker path {path:?} does not address a literal in the {polarity} body of `{predicate}`")]
    InvalidMarker {
        predicate: String,
        polarity: &'static str,
        path: Vec<usize>,
    },
    #[error("equality axioms need `{0}` declared as a binary predicate")]
    MissingEqualityPredicate(String),
}

/// One positive and one negative body per predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalLogicProgram {
    vocab: Vocabulary,
    rules: BTreeMap<String, (Statement, Statement)>,
}

impl FormalLogicProgram {
    /// Builds a program from per-predicate body pairs. Predicates without
    /// an entry get `(false, false)`. The free variables of each body must
    /// lie within the head frame `v1..vn`.
    pub fn new(
        vocab: Vocabulary,
        entries: impl IntoIterator<Item = (String, (Statement, Statement))>,
    ) -> Result<Self, ProgramError> {
        let mut rules: BTreeMap<String, (Statement, Statement)> = vocab
            .predicates()
            .map(|(p, _)| (p.to_string(), (Statement::falsity(), Statement::falsity())))
            .collect();
        for (pred, bodies) in entries {
            if !rules.contains_key(&pred) {
                return Err(ProgramError::UnknownPredicate(pred));
            }
            rules.insert(pred, bodies);
        }
        let program = FormalLogicProgram { vocab, rules };
        program.validate()?;
        Ok(program)
    }

    fn validate(&self) -> Result<(), ProgramError> {
        for (pred, (pos, neg)) in &self.rules {
            let arity = self
                .vocab
                .predicate_arity(pred)
                .ok_or_else(|| ProgramError::UnknownPredicate(pred.clone()))?;
            for body in [pos, neg] {
                body.check(&self.vocab)?;
                for v in body.free_vars() {
                    if v == 0 || v > arity {
                        return Err(ProgramError::FreeVariableEscape {
                            predicate: pred.clone(),
                            var: v,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn predicates(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn bodies(&self, predicate: &str) -> Option<&(Statement, Statement)> {
        self.rules.get(predicate)
    }

    pub fn positive_body(&self, predicate: &str) -> &Statement {
        &self.rules[predicate].0
    }

    pub fn negative_body(&self, predicate: &str) -> &Statement {
        &self.rules[predicate].1
    }

    pub fn rules(&self) -> impl Iterator<Item = (&str, &Statement, &Statement)> {
        self.rules.iter().map(|(p, (pos, neg))| (p.as_str(), pos, neg))
    }

    /// The head literal `℘(v1,…,vn)` for a predicate.
    pub fn head(&self, predicate: &str) -> Literal {
        let arity = self.vocab.predicate_arity(predicate).expect("declared");
        Literal::atom(predicate, (1..=arity).map(Term::var).collect())
    }

    /// Replaces the body pair of one predicate.
    pub fn with_bodies(
        &self,
        predicate: &str,
        pos: Statement,
        neg: Statement,
    ) -> Result<Self, ProgramError> {
        let mut rules = self.rules.clone();
        rules.insert(predicate.to_string(), (pos, neg));
        let program = FormalLogicProgram {
            vocab: self.vocab.clone(),
            rules,
        };
        program.validate()?;
        Ok(program)
    }

    /// Maximum constructor depth of any term occurring in a body. Checked
    /// literals should stay at least this far below the ground depth bound
    /// for boundary truncation to be invisible.
    pub fn body_step(&self) -> usize {
        fn term_depths(s: &Statement, out: &mut usize) {
            match s {
                Statement::Atom(_, args) | Statement::NegAtom(_, args) => {
                    for a in args {
                        *out = (*out).max(a.depth());
                    }
                }
                Statement::Identity(a, b) | Statement::Distinction(a, b) => {
                    *out = (*out).max(a.depth()).max(b.depth());
                }
                Statement::Or(children) | Statement::And(children) => {
                    for c in children {
                        term_depths(c, out);
                    }
                }
                Statement::Exists(_, body) | Statement::Forall(_, body) => term_depths(body, out),
            }
        }
        let mut step = 0;
        for (_, pos, neg) in self.rules() {
            term_depths(pos, &mut step);
            term_depths(neg, &mut step);
        }
        step
    }
}

/// A surface rule: a literal head with arbitrary argument terms, and an
/// NNF body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: Literal,
    pub body: Statement,
}

impl Rule {
    pub fn new(head: Literal, body: Statement) -> Self {
        Rule { head, body }
    }

    pub fn fact(head: Literal) -> Self {
        Rule {
            head,
            body: Statement::truth(),
        }
    }
}

/// Shared shape of NNF bodies, used to run rule merging over both plain
/// statements and general (`not`-bearing) bodies.
pub(crate) trait BodyLike: Clone {
    fn mk_and(children: Vec<Self>) -> Self;
    fn mk_or(children: Vec<Self>) -> Self;
    fn mk_exists(var: usize, body: Self) -> Self;
    fn mk_identity(a: Term, b: Term) -> Self;
    fn free_vars(&self) -> BTreeSet<usize>;
    fn all_vars(&self) -> BTreeSet<usize>;
    fn rename_vars(&self, map: &BTreeMap<usize, usize>) -> Self;
}

fn rename_term(t: &Term, map: &BTreeMap<usize, usize>) -> Term {
    match t {
        Term::Var(i) => Term::Var(map.get(i).copied().unwrap_or(*i)),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| rename_term(a, map)).collect(),
        ),
    }
}

impl BodyLike for Statement {
    fn mk_and(children: Vec<Self>) -> Self {
        Statement::And(children)
    }
    fn mk_or(children: Vec<Self>) -> Self {
        Statement::Or(children)
    }
    fn mk_exists(var: usize, body: Self) -> Self {
        Statement::Exists(var, Box::new(body))
    }
    fn mk_identity(a: Term, b: Term) -> Self {
        Statement::Identity(a, b)
    }
    fn free_vars(&self) -> BTreeSet<usize> {
        Statement::free_vars(self)
    }
    fn all_vars(&self) -> BTreeSet<usize> {
        fn go(s: &Statement, out: &mut BTreeSet<usize>) {
            match s {
                Statement::Atom(_, args) | Statement::NegAtom(_, args) => {
                    for a in args {
                        a.vars(out);
                    }
                }
                Statement::Identity(a, b) | Statement::Distinction(a, b) => {
                    a.vars(out);
                    b.vars(out);
                }
                Statement::Or(children) | Statement::And(children) => {
                    for c in children {
                        go(c, out);
                    }
                }
                Statement::Exists(x, body) | Statement::Forall(x, body) => {
                    out.insert(*x);
                    go(body, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }
    fn rename_vars(&self, map: &BTreeMap<usize, usize>) -> Self {
        match self {
            Statement::Atom(p, args) => Statement::Atom(
                p.clone(),
                args.iter().map(|a| rename_term(a, map)).collect(),
            ),
            Statement::NegAtom(p, args) => Statement::NegAtom(
                p.clone(),
                args.iter().map(|a| rename_term(a, map)).collect(),
            ),
            Statement::Identity(a, b) => {
                Statement::Identity(rename_term(a, map), rename_term(b, map))
            }
            Statement::Distinction(a, b) => {
                Statement::Distinction(rename_term(a, map), rename_term(b, map))
            }
            Statement::Or(children) => {
                Statement::Or(children.iter().map(|c| c.rename_vars(map)).collect())
            }
            Statement::And(children) => {
                Statement::And(children.iter().map(|c| c.rename_vars(map)).collect())
            }
            Statement::Exists(x, body) => Statement::Exists(
                map.get(x).copied().unwrap_or(*x),
                Box::new(body.rename_vars(map)),
            ),
            Statement::Forall(x, body) => Statement::Forall(
                map.get(x).copied().unwrap_or(*x),
                Box::new(body.rename_vars(map)),
            ),
        }
    }
}

fn merge_bodies<B: BodyLike>(
    rules: &[(Literal, B)],
    arity: usize,
) -> B {
    let mut disjuncts = Vec::new();
    for (head, body) in rules {
        // Variables of the rule, renamed away from the head frame v1..vn.
        // Fresh targets avoid every index occurring in the rule so nothing
        // is captured by the rule's own quantifiers.
        let mut rule_vars: BTreeSet<usize> = head.free_vars();
        rule_vars.extend(body.free_vars());
        let mut occupied: BTreeSet<usize> = body.all_vars();
        occupied.extend(head.free_vars());
        occupied.extend(1..=arity);

        // Heads whose arguments are pairwise distinct variables can map
        // straight onto the frame, provided no frame index is already in
        // use inside the body under a different role (which would capture).
        let direct_frame = arity > 0
            && head.args.iter().enumerate().all(|(i, t)| {
                matches!(t, Term::Var(_))
                    && head.args.iter().take(i).all(|earlier| earlier != t)
            })
            && head.args.iter().enumerate().all(|(i, t)| match t {
                Term::Var(v) => *v == i + 1 || !body.all_vars().contains(&(i + 1)),
                _ => false,
            });

        if direct_frame || (arity == 0 && rule_vars.is_empty()) {
            // Heads like ℘(X,Y) map head variables straight onto v1..vn;
            // remaining body variables are existentially closed.
            let mut map = BTreeMap::new();
            let mut head_vars = BTreeSet::new();
            for (i, t) in head.args.iter().enumerate() {
                if let Term::Var(v) = t {
                    map.insert(*v, i + 1);
                    head_vars.insert(*v);
                }
            }
            let mut fresh = fresh_indices(&occupied, arity);
            let locals: Vec<usize> = rule_vars.difference(&head_vars).copied().collect();
            let mut local_targets = Vec::new();
            for v in &locals {
                let target = fresh.next().expect("infinite supply");
                map.insert(*v, target);
                local_targets.push(target);
            }
            let mut disjunct = body.rename_vars(&map);
            for target in local_targets.into_iter().rev() {
                if disjunct.free_vars().contains(&target) {
                    disjunct = B::mk_exists(target, disjunct);
                }
            }
            disjuncts.push(disjunct);
        } else {
            // General heads get identity guards: ∃*(v1 ≐ t1 ∧ … ∧ body).
            let mut map = BTreeMap::new();
            let mut fresh = fresh_indices(&occupied, arity);
            let mut targets = Vec::new();
            for v in &rule_vars {
                let target = fresh.next().expect("infinite supply");
                map.insert(*v, target);
                targets.push(target);
            }
            let mut conjuncts: Vec<B> = head
                .args
                .iter()
                .enumerate()
                .map(|(i, t)| B::mk_identity(Term::var(i + 1), rename_term(t, &map)))
                .collect();
            conjuncts.push(body.rename_vars(&map));
            let mut disjunct = if conjuncts.len() == 1 {
                conjuncts.pop().expect("nonempty")
            } else {
                B::mk_and(conjuncts)
            };
            for target in targets.into_iter().rev() {
                if disjunct.free_vars().contains(&target) {
                    disjunct = B::mk_exists(target, disjunct);
                }
            }
            disjuncts.push(disjunct);
        }
    }
    if disjuncts.len() == 1 {
        disjuncts.pop().expect("nonempty")
    } else {
        B::mk_or(disjuncts)
    }
}

/// Ascending fresh variable indices: the lowest indices outside the head
/// frame and outside `occupied`.
fn fresh_indices(occupied: &BTreeSet<usize>, arity: usize) -> impl Iterator<Item = usize> {
    let occupied = occupied.clone();
    (0usize..).filter(move |i| !(1..=arity).contains(i) && !occupied.contains(i))
}

pub(crate) fn merge_rules_generic<B: BodyLike>(
    rules: &[(Literal, B)],
    vocab: &Vocabulary,
) -> Result<BTreeMap<String, (B, B)>, ProgramError> {
    let mut grouped: BTreeMap<(String, bool), Vec<(Literal, B)>> = BTreeMap::new();
    for (head, body) in rules {
        let arity = vocab
            .predicate_arity(&head.predicate)
            .ok_or_else(|| ProgramError::UnknownPredicate(head.predicate.clone()))?;
        if head.args.len() != arity {
            return Err(ProgramError::HeadArityMismatch {
                predicate: head.predicate.clone(),
                used: head.args.len(),
                declared: arity,
            });
        }
        grouped
            .entry((head.predicate.clone(), head.positive))
            .or_default()
            .push((head.clone(), body.clone()));
    }
    let mut out = BTreeMap::new();
    for (pred, arity) in vocab.predicates() {
        let pos = grouped
            .get(&(pred.to_string(), true))
            .map(|rs| merge_bodies(rs, arity))
            .unwrap_or_else(|| B::mk_or(vec![]));
        let neg = grouped
            .get(&(pred.to_string(), false))
            .map(|rs| merge_bodies(rs, arity))
            .unwrap_or_else(|| B::mk_or(vec![]));
        out.insert(pred.to_string(), (pos, neg));
    }
    Ok(out)
}

/// Merges surface rules into a formal logic program: all rules whose heads
/// are built from one predicate and polarity become a single disjunctive
/// body over the head frame, with identity guards and fresh existentials
/// where head arguments are not plain variables.
pub fn merge_rules(rules: &[Rule], vocab: &Vocabulary) -> Result<FormalLogicProgram, ProgramError> {
    let pairs: Vec<(Literal, Statement)> = rules
        .iter()
        .map(|r| (r.head.clone(), r.body.clone()))
        .collect();
    let merged = merge_rules_generic(&pairs, vocab)?;
    FormalLogicProgram::new(vocab.clone(), merged)
}

/// Sets every negative body to the dual of the positive body.
pub fn symmetric_completion(program: &FormalLogicProgram) -> FormalLogicProgram {
    let rules = program
        .rules
        .iter()
        .map(|(p, (pos, _))| (p.clone(), (pos.clone(), pos.dual())))
        .collect();
    FormalLogicProgram {
        vocab: program.vocab.clone(),
        rules,
    }
}

/// True iff every negative body is syntactically the dual of its positive
/// body.
pub fn is_symmetric(program: &FormalLogicProgram) -> bool {
    program
        .rules
        .values()
        .all(|(pos, neg)| *neg == pos.dual())
}

/// True iff no closed instance of `φ℘⁺ ∧ φ℘⁻` has a model in W, for any
/// predicate. Checked by structure enumeration per closed instance; fails
/// with [`ForcingError::Infeasible`] when an instance touches more ground
/// atoms than the budget.
pub fn is_locally_consistent(
    program: &FormalLogicProgram,
    ctx: &GroundContext,
    atom_budget: usize,
) -> Result<bool, ForcingError> {
    for (_, pos, neg) in program.rules() {
        let conj = Statement::And(vec![pos.clone(), neg.clone()]);
        for instance in crate::forcing::closed_instances(&conj, ctx) {
            if satisfiable_w(&[instance], ctx, atom_budget)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The classical logical form: `{φ℘⁺ → ℘(v…), φ℘⁻ → ¬℘(v…)}` with `→`
/// desugared as `∼body ∨ head`.
pub fn classical_logical_form(program: &FormalLogicProgram) -> Vec<Statement> {
    let mut out = Vec::new();
    for (pred, pos, neg) in program.rules() {
        let head = program.head(pred);
        out.push(Statement::Or(vec![pos.dual(), head.to_statement()]));
        out.push(Statement::Or(vec![
            neg.dual(),
            head.complement().to_statement(),
        ]));
    }
    out
}

/// Per-predicate pair of occurrence-path sets selecting literal
/// occurrences in the positive and negative bodies.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiteralMarker {
    marks: BTreeMap<String, (BTreeSet<OccurrencePath>, BTreeSet<OccurrencePath>)>,
}

impl LiteralMarker {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(
        marks: impl IntoIterator<
            Item = (String, (BTreeSet<OccurrencePath>, BTreeSet<OccurrencePath>)),
        >,
    ) -> Self {
        LiteralMarker {
            marks: marks.into_iter().collect(),
        }
    }

    pub fn positive_marks(&self, predicate: &str) -> BTreeSet<OccurrencePath> {
        self.marks
            .get(predicate)
            .map(|(pos, _)| pos.clone())
            .unwrap_or_default()
    }

    pub fn negative_marks(&self, predicate: &str) -> BTreeSet<OccurrencePath> {
        self.marks
            .get(predicate)
            .map(|(_, neg)| neg.clone())
            .unwrap_or_default()
    }

    pub fn insert_positive(&mut self, predicate: &str, path: OccurrencePath) {
        self.marks
            .entry(predicate.to_string())
            .or_default()
            .0
            .insert(path);
    }

    pub fn insert_negative(&mut self, predicate: &str, path: OccurrencePath) {
        self.marks
            .entry(predicate.to_string())
            .or_default()
            .1
            .insert(path);
    }

    pub fn is_empty(&self) -> bool {
        self.marks
            .values()
            .all(|(pos, neg)| pos.is_empty() && neg.is_empty())
    }

    /// Every path must address a literal occurrence in the corresponding
    /// body of `program`.
    pub fn validate(&self, program: &FormalLogicProgram) -> Result<(), ProgramError> {
        for (pred, (pos_marks, neg_marks)) in &self.marks {
            let Some((pos, neg)) = program.bodies(pred) else {
                return Err(ProgramError::UnknownPredicate(pred.clone()));
            };
            for path in pos_marks {
                if pos.literal_at(path).is_none() {
                    return Err(ProgramError::InvalidMarker {
                        predicate: pred.clone(),
                        polarity: "positive",
                        path: path.0.clone(),
                    });
                }
            }
            for path in neg_marks {
                if neg.literal_at(path).is_none() {
                    return Err(ProgramError::InvalidMarker {
                        predicate: pred.clone(),
                        polarity: "negative",
                        path: path.0.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// NNF bodies enriched with `not literal` leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneralBody {
    Lit(Literal),
    Not(Literal),
    Identity(Term, Term),
    Distinction(Term, Term),
    Or(Vec<GeneralBody>),
    And(Vec<GeneralBody>),
    Exists(usize, Box<GeneralBody>),
    Forall(usize, Box<GeneralBody>),
}

impl BodyLike for GeneralBody {
    fn mk_and(children: Vec<Self>) -> Self {
        GeneralBody::And(children)
    }
    fn mk_or(children: Vec<Self>) -> Self {
        GeneralBody::Or(children)
    }
    fn mk_exists(var: usize, body: Self) -> Self {
        GeneralBody::Exists(var, Box::new(body))
    }
    fn mk_identity(a: Term, b: Term) -> Self {
        GeneralBody::Identity(a, b)
    }
    fn free_vars(&self) -> BTreeSet<usize> {
        fn go(b: &GeneralBody, bound: &mut Vec<usize>, out: &mut BTreeSet<usize>) {
            match b {
                GeneralBody::Lit(l) | GeneralBody::Not(l) => {
                    out.extend(l.free_vars().into_iter().filter(|v| !bound.contains(v)));
                }
                GeneralBody::Identity(a, t) | GeneralBody::Distinction(a, t) => {
                    let mut vars = BTreeSet::new();
                    a.vars(&mut vars);
                    t.vars(&mut vars);
                    out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
                }
                GeneralBody::Or(children) | GeneralBody::And(children) => {
                    for c in children {
                        go(c, bound, out);
                    }
                }
                GeneralBody::Exists(x, body) | GeneralBody::Forall(x, body) => {
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
    fn all_vars(&self) -> BTreeSet<usize> {
        fn go(b: &GeneralBody, out: &mut BTreeSet<usize>) {
            match b {
                GeneralBody::Lit(l) | GeneralBody::Not(l) => out.extend(l.free_vars()),
                GeneralBody::Identity(a, t) | GeneralBody::Distinction(a, t) => {
                    a.vars(out);
                    t.vars(out);
                }
                GeneralBody::Or(children) | GeneralBody::And(children) => {
                    for c in children {
                        go(c, out);
                    }
                }
                GeneralBody::Exists(x, body) | GeneralBody::Forall(x, body) => {
                    out.insert(*x);
                    go(body, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }
    fn rename_vars(&self, map: &BTreeMap<usize, usize>) -> Self {
        let rename_lit = |l: &Literal| Literal {
            positive: l.positive,
            predicate: l.predicate.clone(),
            args: l.args.iter().map(|a| rename_term(a, map)).collect(),
        };
        match self {
            GeneralBody::Lit(l) => GeneralBody::Lit(rename_lit(l)),
            GeneralBody::Not(l) => GeneralBody::Not(rename_lit(l)),
            GeneralBody::Identity(a, b) => {
                GeneralBody::Identity(rename_term(a, map), rename_term(b, map))
            }
            GeneralBody::Distinction(a, b) => {
                GeneralBody::Distinction(rename_term(a, map), rename_term(b, map))
            }
            GeneralBody::Or(children) => {
                GeneralBody::Or(children.iter().map(|c| c.rename_vars(map)).collect())
            }
            GeneralBody::And(children) => {
                GeneralBody::And(children.iter().map(|c| c.rename_vars(map)).collect())
            }
            GeneralBody::Exists(x, body) => GeneralBody::Exists(
                map.get(x).copied().unwrap_or(*x),
                Box::new(body.rename_vars(map)),
            ),
            GeneralBody::Forall(x, body) => GeneralBody::Forall(
                map.get(x).copied().unwrap_or(*x),
                Box::new(body.rename_vars(map)),
            ),
        }
    }
}

/// A logic program with two negations: classical `¬` and marker-encoded
/// `not`, the latter applicable to literals only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralProgram {
    vocab: Vocabulary,
    rules: BTreeMap<String, (GeneralBody, GeneralBody)>,
}

impl GeneralProgram {
    pub fn new(
        vocab: Vocabulary,
        entries: impl IntoIterator<Item = (String, (GeneralBody, GeneralBody))>,
    ) -> Self {
        let mut rules: BTreeMap<String, (GeneralBody, GeneralBody)> = vocab
            .predicates()
            .map(|(p, _)| {
                (
                    p.to_string(),
                    (GeneralBody::Or(vec![]), GeneralBody::Or(vec![])),
                )
            })
            .collect();
        rules.extend(entries);
        GeneralProgram { vocab, rules }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn bodies(&self, predicate: &str) -> Option<&(GeneralBody, GeneralBody)> {
        self.rules.get(predicate)
    }

    pub fn rules(&self) -> impl Iterator<Item = (&str, &GeneralBody, &GeneralBody)> {
        self.rules.iter().map(|(p, (pos, neg))| (p.as_str(), pos, neg))
    }

    pub fn contains_not(&self) -> bool {
        fn has_not(b: &GeneralBody) -> bool {
            match b {
                GeneralBody::Not(_) => true,
                GeneralBody::Lit(_)
                | GeneralBody::Identity(..)
                | GeneralBody::Distinction(..) => false,
                GeneralBody::Or(children) | GeneralBody::And(children) => {
                    children.iter().any(has_not)
                }
                GeneralBody::Exists(_, body) | GeneralBody::Forall(_, body) => has_not(body),
            }
        }
        self.rules
            .values()
            .any(|(pos, neg)| has_not(pos) || has_not(neg))
    }
}

/// Merges surface general rules (bodies may contain `not`) into one rule
/// per predicate and polarity.
pub fn merge_general_rules(
    rules: &[(Literal, GeneralBody)],
    vocab: &Vocabulary,
) -> Result<GeneralProgram, ProgramError> {
    let merged = merge_rules_generic(rules, vocab)?;
    Ok(GeneralProgram::new(vocab.clone(), merged))
}

fn translate_general_body(
    body: &GeneralBody,
    prefix: &mut Vec<usize>,
    marks: &mut BTreeSet<OccurrencePath>,
) -> Statement {
    match body {
        GeneralBody::Lit(l) => l.to_statement(),
        GeneralBody::Not(l) => {
            marks.insert(OccurrencePath(prefix.clone()));
            l.complement().to_statement()
        }
        GeneralBody::Identity(a, b) => Statement::Identity(a.clone(), b.clone()),
        GeneralBody::Distinction(a, b) => Statement::Distinction(a.clone(), b.clone()),
        GeneralBody::Or(children) => Statement::Or(
            children
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    prefix.push(i);
                    let s = translate_general_body(c, prefix, marks);
                    prefix.pop();
                    s
                })
                .collect(),
        ),
        GeneralBody::And(children) => Statement::And(
            children
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    prefix.push(i);
                    let s = translate_general_body(c, prefix, marks);
                    prefix.pop();
                    s
                })
                .collect(),
        ),
        GeneralBody::Exists(x, inner) => {
            prefix.push(0);
            let s = translate_general_body(inner, prefix, marks);
            prefix.pop();
            Statement::Exists(*x, Box::new(s))
        }
        GeneralBody::Forall(x, inner) => {
            prefix.push(0);
            let s = translate_general_body(inner, prefix, marks);
            prefix.pop();
            Statement::Forall(*x, Box::new(s))
        }
    }
}

/// Replaces every `not literal` with `∼literal` and records its occurrence
/// path in the marker: the unique `(P, Ω)` with `P[Ω] = G`.
pub fn from_general_program(
    general: &GeneralProgram,
) -> Result<(FormalLogicProgram, LiteralMarker), ProgramError> {
    let mut marker = LiteralMarker::empty();
    let mut entries = Vec::new();
    for (pred, pos, neg) in general.rules() {
        let mut pos_marks = BTreeSet::new();
        let pos_stmt = translate_general_body(pos, &mut Vec::new(), &mut pos_marks);
        let mut neg_marks = BTreeSet::new();
        let neg_stmt = translate_general_body(neg, &mut Vec::new(), &mut neg_marks);
        for path in pos_marks {
            marker.insert_positive(pred, path);
        }
        for path in neg_marks {
            marker.insert_negative(pred, path);
        }
        entries.push((pred.to_string(), (pos_stmt, neg_stmt)));
    }
    let program = FormalLogicProgram::new(general.vocabulary().clone(), entries)?;
    marker.validate(&program)?;
    Ok((program, marker))
}

fn untranslate_body(
    body: &Statement,
    prefix: &mut Vec<usize>,
    marks: &BTreeSet<OccurrencePath>,
) -> Result<GeneralBody, ProgramError> {
    let here_marked = marks.contains(&OccurrencePath(prefix.clone()));
    match body {
        Statement::Atom(..) | Statement::NegAtom(..) => {
            let lit = body.as_literal().expect("literal");
            Ok(if here_marked {
                GeneralBody::Not(lit.complement())
            } else {
                GeneralBody::Lit(lit)
            })
        }
        Statement::Identity(a, b) => Ok(GeneralBody::Identity(a.clone(), b.clone())),
        Statement::Distinction(a, b) => Ok(GeneralBody::Distinction(a.clone(), b.clone())),
        Statement::Or(children) => Ok(GeneralBody::Or(
            children
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    prefix.push(i);
                    let r = untranslate_body(c, prefix, marks);
                    prefix.pop();
                    r
                })
                .collect::<Result<_, _>>()?,
        )),
        Statement::And(children) => Ok(GeneralBody::And(
            children
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    prefix.push(i);
                    let r = untranslate_body(c, prefix, marks);
                    prefix.pop();
                    r
                })
                .collect::<Result<_, _>>()?,
        )),
        Statement::Exists(x, inner) => {
            prefix.push(0);
            let r = untranslate_body(inner, prefix, marks)?;
            prefix.pop();
            Ok(GeneralBody::Exists(*x, Box::new(r)))
        }
        Statement::Forall(x, inner) => {
            prefix.push(0);
            let r = untranslate_body(inner, prefix, marks)?;
            prefix.pop();
            Ok(GeneralBody::Forall(*x, Box::new(r)))
        }
    }
}

/// Inverse of [`from_general_program`]: every marked literal `φ` becomes
/// `not ∼φ`.
pub fn to_general_program(
    program: &FormalLogicProgram,
    marker: &LiteralMarker,
) -> Result<GeneralProgram, ProgramError> {
    marker.validate(program)?;
    let mut entries = Vec::new();
    for (pred, pos, neg) in program.rules() {
        let pos_body = untranslate_body(pos, &mut Vec::new(), &marker.positive_marks(pred))?;
        let neg_body = untranslate_body(neg, &mut Vec::new(), &marker.negative_marks(pred))?;
        entries.push((pred.to_string(), (pos_body, neg_body)));
    }
    Ok(GeneralProgram::new(program.vocabulary().clone(), entries))
}

/// The axiomatization of a nonlogical equality predicate: bodies for the
/// equality predicate itself plus substitution disjuncts for every other
/// predicate.
#[derive(Debug, Clone)]
pub struct EqualityFragment {
    pub eq_predicate: String,
    pub eq_positive: Vec<Statement>,
    pub eq_negative: Vec<Statement>,
    pub positive_extra: BTreeMap<String, Statement>,
    pub negative_extra: BTreeMap<String, Statement>,
}

fn conj(mut children: Vec<Statement>) -> Statement {
    if children.len() == 1 {
        children.pop().expect("nonempty")
    } else {
        Statement::And(children)
    }
}

fn exists_chain(vars: impl IntoIterator<Item = usize>, body: Statement) -> Statement {
    let vars: Vec<usize> = vars.into_iter().collect();
    let mut out = body;
    for v in vars.into_iter().rev() {
        out = Statement::Exists(v, Box::new(out));
    }
    out
}

/// Emits the minimal axiom set for an equality predicate `eq`:
/// reflexivity via identity, symmetry, transitivity, one congruence
/// disjunct per function symbol, a distinction witness for the negative
/// body, and one substitution disjunct per other predicate and polarity.
pub fn equality_axioms(
    vocab: &Vocabulary,
    eq: &str,
) -> Result<EqualityFragment, ProgramError> {
    if vocab.predicate_arity(eq) != Some(2) {
        return Err(ProgramError::MissingEqualityPredicate(eq.to_string()));
    }
    let eq_atom = |a: Term, b: Term| Statement::Atom(eq.to_string(), vec![a, b]);
    let eq_neg_atom = |a: Term, b: Term| Statement::NegAtom(eq.to_string(), vec![a, b]);
    let v = Term::var;

    let mut eq_positive = vec![
        Statement::Identity(v(1), v(2)),
        eq_atom(v(2), v(1)),
        exists_chain(
            [0],
            Statement::And(vec![eq_atom(v(1), v(0)), eq_atom(v(0), v(2))]),
        ),
    ];
    for (f, n) in vocab.functions() {
        // ∃v3…v_{3+2n-1}( v3 = v_{3+n} ∧ … ∧ v1 ≐ f(v3,…) ∧ v2 ≐ f(v_{3+n},…) )
        let left: Vec<usize> = (3..3 + n).collect();
        let right: Vec<usize> = (3 + n..3 + 2 * n).collect();
        let mut children: Vec<Statement> = left
            .iter()
            .zip(&right)
            .map(|(&a, &b)| eq_atom(v(a), v(b)))
            .collect();
        children.push(Statement::Identity(
            v(1),
            Term::app(f, left.iter().map(|&i| v(i)).collect()),
        ));
        children.push(Statement::Identity(
            v(2),
            Term::app(f, right.iter().map(|&i| v(i)).collect()),
        ));
        eq_positive.push(exists_chain(
            left.into_iter().chain(right),
            conj(children),
        ));
    }

    let eq_negative = vec![exists_chain(
        [0],
        Statement::Or(vec![
            Statement::And(vec![eq_atom(v(0), v(1)), eq_neg_atom(v(0), v(2))]),
            Statement::And(vec![eq_neg_atom(v(0), v(1)), eq_atom(v(0), v(2))]),
        ]),
    )];

    let mut positive_extra = BTreeMap::new();
    let mut negative_extra = BTreeMap::new();
    for (pred, n) in vocab.predicates() {
        if pred == eq {
            continue;
        }
        let fresh: Vec<usize> = (n + 1..=2 * n).collect();
        let mut children: Vec<Statement> = (1..=n)
            .map(|i| eq_atom(v(i), v(n + i)))
            .collect();
        children.push(Statement::Atom(
            pred.to_string(),
            fresh.iter().map(|&i| v(i)).collect(),
        ));
        positive_extra.insert(
            pred.to_string(),
            exists_chain(fresh.clone(), conj(children.clone())),
        );
        let last = children.len() - 1;
        children[last] = Statement::NegAtom(
            pred.to_string(),
            fresh.iter().map(|&i| v(i)).collect(),
        );
        negative_extra.insert(pred.to_string(), exists_chain(fresh, conj(children)));
    }

    Ok(EqualityFragment {
        eq_predicate: eq.to_string(),
        eq_positive,
        eq_negative,
        positive_extra,
        negative_extra,
    })
}

impl EqualityFragment {
    /// Disjoins the fragment onto a program: the equality predicate's
    /// bodies gain the axiom disjuncts, every other predicate gains its
    /// substitution disjunct.
    pub fn apply_to(&self, program: &FormalLogicProgram) -> Result<FormalLogicProgram, ProgramError> {
        fn or_extend(body: &Statement, extra: &[Statement]) -> Statement {
            if extra.is_empty() {
                return body.clone();
            }
            let mut children = match body {
                Statement::Or(cs) => cs.clone(),
                other => vec![other.clone()],
            };
            children.extend(extra.iter().cloned());
            Statement::Or(children)
        }
        let mut entries = Vec::new();
        for (pred, pos, neg) in program.rules() {
            let (pos_extra, neg_extra) = if pred == self.eq_predicate {
                (self.eq_positive.clone(), self.eq_negative.clone())
            } else {
                (
                    self.positive_extra.get(pred).cloned().into_iter().collect(),
                    self.negative_extra.get(pred).cloned().into_iter().collect(),
                )
            };
            entries.push((
                pred.to_string(),
                (or_extend(pos, &pos_extra), or_extend(neg, &neg_extra)),
            ));
        }
        FormalLogicProgram::new(program.vocabulary().clone(), entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::DEFAULT_ATOM_BUDGET;

    fn num(n: usize) -> Term {
        Term::numeral(n, "0", "s")
    }

    fn nat_vocab(preds: &[(&str, usize)]) -> Vocabulary {
        Vocabulary::with(
            [("0", 0), ("s", 1)],
            preds.iter().map(|&(n, a)| (n.to_string(), a)),
        )
        .unwrap()
    }

    #[test]
    fn merge_produces_identity_guards_and_fresh_existentials() {
        // { p(0). , p(s(s(X))) <- p(X). }
        let vocab = nat_vocab(&[("p", 1)]);
        let rules = vec![
            Rule::fact(Literal::atom("p", vec![num(0)])),
            Rule::new(
                Literal::atom(
                    "p",
                    vec![Term::app("s", vec![Term::app("s", vec![Term::var(1)])])],
                ),
                Statement::Atom("p".into(), vec![Term::var(1)]),
            ),
        ];
        let program = merge_rules(&rules, &vocab).unwrap();
        let expected = Statement::Or(vec![
            Statement::And(vec![
                Statement::Identity(Term::var(1), num(0)),
                Statement::truth(),
            ]),
            Statement::Exists(
                0,
                Box::new(Statement::And(vec![
                    Statement::Identity(
                        Term::var(1),
                        Term::app("s", vec![Term::app("s", vec![Term::var(0)])]),
                    ),
                    Statement::Atom("p".into(), vec![Term::var(0)]),
                ])),
            ),
        ]);
        assert_eq!(program.positive_body("p"), &expected);
        assert_eq!(program.negative_body("p"), &Statement::falsity());
        // The paper's canonical form is logically equivalent in W.
        let canonical = Statement::Or(vec![
            Statement::Identity(Term::var(1), num(0)),
            Statement::Exists(
                0,
                Box::new(Statement::And(vec![
                    Statement::Identity(
                        Term::var(1),
                        Term::app("s", vec![Term::app("s", vec![Term::var(0)])]),
                    ),
                    Statement::Atom("p".into(), vec![Term::var(0)]),
                ])),
            ),
        ]);
        let ctx = GroundContext::new(vocab, 4);
        assert_eq!(
            crate::forcing::equivalent_w(
                program.positive_body("p"),
                &canonical,
                &ctx,
                DEFAULT_ATOM_BUDGET
            ),
            Ok(true)
        );
    }

    #[test]
    fn merge_maps_plain_variable_heads_directly() {
        // p(X) <- p(s(s(X))) keeps the body over v1 without guards.
        let vocab = nat_vocab(&[("p", 1)]);
        let rules = vec![Rule::new(
            Literal::atom("p", vec![Term::var(1)]),
            Statement::Atom(
                "p".into(),
                vec![Term::app("s", vec![Term::app("s", vec![Term::var(1)])])],
            ),
        )];
        let program = merge_rules(&rules, &vocab).unwrap();
        assert_eq!(
            program.positive_body("p"),
            &Statement::Atom(
                "p".into(),
                vec![Term::app("s", vec![Term::app("s", vec![Term::var(1)])])],
            )
        );
    }

    #[test]
    fn merge_leaves_unruled_predicates_false() {
        let vocab = nat_vocab(&[("p", 1), ("q", 0)]);
        let program = merge_rules(&[], &vocab).unwrap();
        assert_eq!(program.positive_body("q"), &Statement::falsity());
        assert_eq!(program.negative_body("q"), &Statement::falsity());
    }

    #[test]
    fn merge_rejects_head_arity_mismatch() {
        let vocab = nat_vocab(&[("p", 1)]);
        let rules = vec![Rule::fact(Literal::atom("p", vec![num(0), num(0)]))];
        assert!(matches!(
            merge_rules(&rules, &vocab),
            Err(ProgramError::HeadArityMismatch { .. })
        ));
    }

    #[test]
    fn merged_bodies_satisfy_the_head_frame_condition() {
        let vocab = nat_vocab(&[("p", 2), ("q", 1)]);
        let rules = vec![
            Rule::new(
                Literal::atom("p", vec![Term::var(1), Term::app("s", vec![Term::var(2)])]),
                Statement::Atom("q".into(), vec![Term::var(2)]),
            ),
            Rule::new(
                Literal::atom("q", vec![Term::var(5)]),
                Statement::Exists(
                    0,
                    Box::new(Statement::And(vec![
                        Statement::Identity(Term::var(5), Term::app("s", vec![Term::var(0)])),
                        Statement::Atom("q".into(), vec![Term::var(0)]),
                    ])),
                ),
            ),
        ];
        // Construction validates the Def-15 frame condition internally.
        let program = merge_rules(&rules, &vocab).unwrap();
        for (pred, pos, neg) in program.rules() {
            let arity = vocab.predicate_arity(pred).unwrap();
            for body in [pos, neg] {
                assert!(body.free_vars().iter().all(|&v| v >= 1 && v <= arity));
            }
        }
    }

    #[test]
    fn symmetric_completion_and_checks() {
        let vocab = nat_vocab(&[("p", 0), ("q", 0)]);
        // { p <- -q , q <- -p } symmetric: negative bodies are q and p.
        let program = FormalLogicProgram::new(
            vocab,
            [
                (
                    "p".to_string(),
                    (
                        Statement::NegAtom("q".into(), vec![]),
                        Statement::falsity(),
                    ),
                ),
                (
                    "q".to_string(),
                    (
                        Statement::NegAtom("p".into(), vec![]),
                        Statement::falsity(),
                    ),
                ),
            ],
        )
        .unwrap();
        let sym = symmetric_completion(&program);
        assert!(is_symmetric(&sym));
        assert_eq!(sym.negative_body("p"), &Statement::Atom("q".into(), vec![]));
        assert_eq!(sym.negative_body("q"), &Statement::Atom("p".into(), vec![]));
        assert_eq!(Statement::truth().dual(), Statement::falsity());
    }

    #[test]
    fn local_consistency_cases() {
        let vocab = nat_vocab(&[("p", 0)]);
        let ctx = GroundContext::new(vocab.clone(), 2);
        let contradictory = FormalLogicProgram::new(
            vocab.clone(),
            [(
                "p".to_string(),
                (Statement::truth(), Statement::truth()),
            )],
        )
        .unwrap();
        assert_eq!(
            is_locally_consistent(&contradictory, &ctx, DEFAULT_ATOM_BUDGET),
            Ok(false)
        );
        let symmetric = symmetric_completion(&contradictory);
        assert_eq!(
            is_locally_consistent(&symmetric, &ctx, DEFAULT_ATOM_BUDGET),
            Ok(true)
        );
    }

    #[test]
    fn classical_logical_form_shape() {
        let vocab = nat_vocab(&[("q", 0), ("q3", 0)]);
        let program = FormalLogicProgram::new(
            vocab,
            [(
                "q".to_string(),
                (Statement::Atom("q3".into(), vec![]), Statement::falsity()),
            )],
        )
        .unwrap();
        let clf = classical_logical_form(&program);
        assert_eq!(clf.len(), 4);
        assert!(clf.contains(&Statement::Or(vec![
            Statement::NegAtom("q3".into(), vec![]),
            Statement::Atom("q".into(), vec![]),
        ])));
        // A fact entry (true, false) yields false ∨ head ≡ head and true ∨ ¬head.
        let program = FormalLogicProgram::new(
            nat_vocab(&[("q", 0)]),
            [("q".to_string(), (Statement::truth(), Statement::falsity()))],
        )
        .unwrap();
        let clf = classical_logical_form(&program);
        assert!(clf.contains(&Statement::Or(vec![
            Statement::falsity(),
            Statement::Atom("q".into(), vec![]),
        ])));
        assert!(clf.contains(&Statement::Or(vec![
            Statement::truth(),
            Statement::NegAtom("q".into(), vec![]),
        ])));
    }

    #[test]
    fn general_program_round_trip() {
        // p(X) <- (not p(X) ; q(X)) , (-p(X) ; not -r(X))
        let vocab = nat_vocab(&[("p", 1), ("q", 1), ("r", 1)]);
        let x = Term::var(1);
        let body = GeneralBody::And(vec![
            GeneralBody::Or(vec![
                GeneralBody::Not(Literal::atom("p", vec![x.clone()])),
                GeneralBody::Lit(Literal::atom("q", vec![x.clone()])),
            ]),
            GeneralBody::Or(vec![
                GeneralBody::Lit(Literal::neg_atom("p", vec![x.clone()])),
                GeneralBody::Not(Literal::neg_atom("r", vec![x.clone()])),
            ]),
        ]);
        let general = GeneralProgram::new(
            vocab,
            [(
                "p".to_string(),
                (body, GeneralBody::Or(vec![])),
            )],
        );
        let (program, marker) = from_general_program(&general).unwrap();
        // Translated body: (-p(X); q(X)), (-p(X); r(X)) with marks on the
        // first -p(X) and on r(X).
        let expected = Statement::And(vec![
            Statement::Or(vec![
                Statement::NegAtom("p".into(), vec![x.clone()]),
                Statement::Atom("q".into(), vec![x.clone()]),
            ]),
            Statement::Or(vec![
                Statement::NegAtom("p".into(), vec![x.clone()]),
                Statement::Atom("r".into(), vec![x.clone()]),
            ]),
        ]);
        assert_eq!(program.positive_body("p"), &expected);
        assert_eq!(
            marker.positive_marks("p"),
            BTreeSet::from([vec![0, 0].into(), vec![1, 1].into()])
        );
        let back = to_general_program(&program, &marker).unwrap();
        assert_eq!(back, general);
    }

    #[test]
    fn empty_marker_untranslates_without_not() {
        let vocab = nat_vocab(&[("p", 0)]);
        let program = FormalLogicProgram::new(
            vocab,
            [(
                "p".to_string(),
                (Statement::NegAtom("p".into(), vec![]), Statement::falsity()),
            )],
        )
        .unwrap();
        let general = to_general_program(&program, &LiteralMarker::empty()).unwrap();
        assert_eq!(
            general.bodies("p").unwrap().0,
            GeneralBody::Lit(Literal::neg_prop("p"))
        );
        assert!(!general.contains_not());
    }

    #[test]
    fn marked_atom_untranslates_to_not_negation() {
        let vocab = nat_vocab(&[("a", 0), ("b", 0)]);
        let program = FormalLogicProgram::new(
            vocab,
            [(
                "a".to_string(),
                (Statement::Atom("b".into(), vec![]), Statement::falsity()),
            )],
        )
        .unwrap();
        let mut marker = LiteralMarker::empty();
        marker.insert_positive("a", OccurrencePath::root());
        let general = to_general_program(&program, &marker).unwrap();
        assert_eq!(
            general.bodies("a").unwrap().0,
            GeneralBody::Not(Literal::neg_prop("b"))
        );
    }

    #[test]
    fn equality_axioms_shapes() {
        // One unary function symbol, one unary predicate besides eq.
        let vocab = Vocabulary::with([("f", 1)], [("eq", 2), ("p", 1)]).unwrap();
        let fragment = equality_axioms(&vocab, "eq").unwrap();
        // Base disjuncts plus one congruence disjunct for f.
        assert_eq!(fragment.eq_positive.len(), 4);
        let congruence = &fragment.eq_positive[3];
        // Two quantified variables: v3 and v4.
        let rendered = congruence.to_string();
        assert!(rendered.contains("exists V3"), "{rendered}");
        assert!(rendered.contains("exists V4"), "{rendered}");
        assert!(fragment.positive_extra.contains_key("p"));
        assert!(!fragment.positive_extra.contains_key("eq"));

        // No functions, no predicates besides eq: just the three base
        // disjuncts.
        let bare = Vocabulary::with([] as [(&str, usize); 0], [("eq", 2)]).unwrap();
        let fragment = equality_axioms(&bare, "eq").unwrap();
        assert_eq!(fragment.eq_positive.len(), 3);
        assert!(fragment.positive_extra.is_empty());

        assert!(matches!(
            equality_axioms(&nat_vocab(&[("p", 1)]), "eq"),
            Err(ProgramError::MissingEqualityPredicate(_))
        ));
    }

    #[test]
    fn marker_validation_rejects_bad_paths() {
        let vocab = nat_vocab(&[("p", 0)]);
        let program = FormalLogicProgram::new(
            vocab,
            [(
                "p".to_string(),
                (Statement::Atom("p".into(), vec![]), Statement::falsity()),
            )],
        )
        .unwrap();
        let mut marker = LiteralMarker::empty();
        marker.insert_positive("p", vec![3].into());
        assert!(matches!(
            marker.validate(&program),
            Err(ProgramError::InvalidMarker { .. })
        ));
    }
}
