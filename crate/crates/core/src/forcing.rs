//! The forcing relation `S ⊩ φ`, standard structures, models, and logical
//! consequence over a depth-bounded Herbrand base.
//!
//! A [`GroundContext`] fixes a vocabulary and a maximum term depth, which
//! induces a finite universe of closed terms and a finite ground literal
//! base. Quantifiers range over that universe. Literal leaves whose terms
//! exceed the bound are handled according to a [`Boundary`] policy: callers
//! either get a distinct overflow signal, or opt into truncation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{literal_is_instance, Literal, Statement, Term, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForcingError {
    #[error("literal {0} exceeds the ground depth bound")]
    DepthOverflow(Literal),
    #[error("enumeration over {atoms} ground atoms exceeds the budget of {budget}")]
    Infeasible { atoms: usize, budget: usize },
    #[error("{0} and its complement are both present in a set required to be consistent")]
    Inconsistent(Literal),
    #[error("statement has free variables where a closed statement is required")]
    OpenStatement,
}

/// How literal leaves outside the ground base are treated during
/// evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Signal [`ForcingError::DepthOverflow`] distinctly from `false`.
    Strict,
    /// Out-of-base literals are never forced. The right reading for least
    /// fixpoints: a literal beyond the bound cannot have been generated.
    Truncate,
    /// Out-of-base literals are always forced. The right reading for
    /// greatest fixpoints, which approximate the unbounded base from
    /// above; results are reliable for literals that stay a couple of
    /// constructor applications below the bound.
    Optimistic,
}

/// A vocabulary together with a maximum closed-term depth, inducing the
/// finite universe and ground literal base all semantics run over.
#[derive(Debug, Clone)]
pub struct GroundContext {
    vocab: Vocabulary,
    depth: usize,
    universe: Vec<Term>,
    atoms: Vec<Literal>,
    atom_index: BTreeMap<(String, Vec<Term>), usize>,
}

impl GroundContext {
    pub fn new(vocab: Vocabulary, depth: usize) -> Self {
        let universe = build_universe(&vocab, depth);
        let mut atoms = Vec::new();
        for (pred, arity) in vocab.predicates() {
            let mut args = vec![0usize; arity];
            if arity == 0 {
                atoms.push(Literal::atom(pred, vec![]));
                continue;
            }
            if universe.is_empty() {
                continue;
            }
            loop {
                atoms.push(Literal::atom(
                    pred,
                    args.iter().map(|&i| universe[i].clone()).collect(),
                ));
                // odometer over universe indices
                let mut k = arity;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    args[k] += 1;
                    if args[k] < universe.len() {
                        break;
                    }
                    args[k] = 0;
                    if k == 0 {
                        args.clear();
                        break;
                    }
                }
                if args.is_empty() {
                    break;
                }
            }
        }
        atoms.sort();
        let atom_index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| ((a.predicate.clone(), a.args.clone()), i))
            .collect();
        GroundContext {
            vocab,
            depth,
            universe,
            atoms,
            atom_index,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// All closed terms of depth at most the bound, in canonical order.
    pub fn universe(&self) -> &[Term] {
        &self.universe
    }

    /// The ground atom base, in canonical order.
    pub fn atoms(&self) -> &[Literal] {
        &self.atoms
    }

    /// Both polarities over the atom base.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.atoms
            .iter()
            .flat_map(|a| [a.clone(), a.complement()])
    }

    pub fn atom_position(&self, lit: &Literal) -> Option<usize> {
        self.atom_index
            .get(&(lit.predicate.clone(), lit.args.clone()))
            .copied()
    }

    /// True iff the (ground) literal lies within the ground base.
    pub fn in_base(&self, lit: &Literal) -> bool {
        lit.is_closed() && self.atom_position(lit).is_some()
    }

    /// Closed in-base instances of a possibly open literal.
    pub fn instances_of(&self, pattern: &Literal) -> Vec<Literal> {
        if pattern.is_closed() {
            return if self.in_base(pattern) {
                vec![pattern.clone()]
            } else {
                vec![]
            };
        }
        let vars: Vec<usize> = pattern.free_vars().into_iter().collect();
        let mut out = Vec::new();
        let mut pick = vec![0usize; vars.len()];
        if self.universe.is_empty() {
            return out;
        }
        'outer: loop {
            let subst = crate::syntax::Substitution::from_pairs(
                vars.iter()
                    .zip(&pick)
                    .map(|(&v, &i)| (v, self.universe[i].clone())),
            )
            .expect("universe terms are closed");
            let inst = pattern.substitute(&subst);
            if self.in_base(&inst) {
                out.push(inst);
            }
            let mut k = pick.len();
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < self.universe.len() {
                    break;
                }
                pick[k] = 0;
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Closed in-base instances of every member of a literal set.
    pub fn instance_closure(&self, lits: &BTreeSet<Literal>) -> BTreeSet<Literal> {
        lits.iter()
            .flat_map(|l| self.instances_of(l))
            .collect()
    }

    /// Instance-level consistency: no in-base atom is an instance of both a
    /// positive and a negative member.
    pub fn set_is_consistent(&self, lits: &BTreeSet<Literal>) -> bool {
        let closed = self.instance_closure(lits);
        closed.iter().all(|l| !closed.contains(&l.complement()))
    }
}

fn build_universe(vocab: &Vocabulary, depth: usize) -> Vec<Term> {
    // Terms stratified by depth; level d+1 applies every non-nullary
    // function to arguments of maximal depth exactly d.
    let mut by_depth: Vec<Vec<Term>> = Vec::new();
    let constants: Vec<Term> = vocab
        .functions()
        .filter(|&(_, a)| a == 0)
        .map(|(n, _)| Term::constant(n))
        .collect();
    if constants.is_empty() {
        return Vec::new();
    }
    by_depth.push(constants);
    for d in 0..depth {
        let shallow: Vec<&Term> = by_depth.iter().flatten().collect();
        let mut next = Vec::new();
        for (f, arity) in vocab.functions() {
            if arity == 0 {
                continue;
            }
            let mut pick = vec![0usize; arity];
            'tuples: loop {
                let args: Vec<Term> = pick.iter().map(|&i| shallow[i].clone()).collect();
                if args.iter().map(Term::depth).max() == Some(d) {
                    next.push(Term::app(f, args));
                }
                let mut k = arity;
                loop {
                    if k == 0 {
                        break 'tuples;
                    }
                    k -= 1;
                    pick[k] += 1;
                    if pick[k] < shallow.len() {
                        break;
                    }
                    pick[k] = 0;
                    if k == 0 {
                        break 'tuples;
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        by_depth.push(next);
    }
    let mut universe: Vec<Term> = by_depth.into_iter().flatten().collect();
    universe.sort_by(|a, b| a.depth().cmp(&b.depth()).then_with(|| a.cmp(b)));
    universe
}

/// A consistent set of closed literals: the output currency of every
/// semantics.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialInterpretation(BTreeSet<Literal>);

impl PartialInterpretation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(lits: BTreeSet<Literal>) -> Result<Self, ForcingError> {
        for l in &lits {
            if !l.is_closed() {
                return Err(ForcingError::OpenStatement);
            }
            if lits.contains(&l.complement()) {
                return Err(ForcingError::Inconsistent(l.clone()));
            }
        }
        Ok(PartialInterpretation(lits))
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.0.contains(lit)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_set(&self) -> &BTreeSet<Literal> {
        &self.0
    }

    pub fn into_set(self) -> BTreeSet<Literal> {
        self.0
    }

    /// Atoms of the interpretation, as a standard structure.
    pub fn positive_part(&self) -> StandardStructure {
        StandardStructure::new(self.0.iter().filter(|l| l.positive).cloned().collect())
            .expect("atoms only")
    }
}

impl fmt::Display for PartialInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<Literal> for PartialInterpretation {
    /// Panics on inconsistent input; prefer [`PartialInterpretation::new`]
    /// when consistency is not known in advance.
    fn from_iter<T: IntoIterator<Item = Literal>>(iter: T) -> Self {
        PartialInterpretation::new(iter.into_iter().collect()).expect("consistent literal set")
    }
}

/// A set of closed atoms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StandardStructure(BTreeSet<Literal>);

impl StandardStructure {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(atoms: BTreeSet<Literal>) -> Result<Self, ForcingError> {
        for a in &atoms {
            if !a.positive || !a.is_closed() {
                return Err(ForcingError::Inconsistent(a.clone()));
            }
        }
        Ok(StandardStructure(atoms))
    }

    pub fn contains(&self, atom: &Literal) -> bool {
        self.0.contains(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.0.iter()
    }

    pub fn as_set(&self) -> &BTreeSet<Literal> {
        &self.0
    }
}

impl FromIterator<Literal> for StandardStructure {
    fn from_iter<T: IntoIterator<Item = Literal>>(iter: T) -> Self {
        StandardStructure::new(iter.into_iter().collect()).expect("closed atoms only")
    }
}

struct Env {
    bindings: Vec<(usize, Term)>,
}

impl Env {
    fn resolve(&self, t: &Term) -> Term {
        match t {
            Term::Var(i) => self
                .bindings
                .iter()
                .rev()
                .find(|(v, _)| v == i)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| Term::Var(*i)),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.resolve(a)).collect())
            }
        }
    }
}

fn eval_forces(
    s: &BTreeSet<Literal>,
    phi: &Statement,
    env: &mut Env,
    ctx: &GroundContext,
    boundary: Boundary,
) -> Result<bool, ForcingError> {
    match phi {
        Statement::Atom(..) | Statement::NegAtom(..) => {
            let lit = phi.as_literal().expect("literal");
            let lit = Literal {
                positive: lit.positive,
                predicate: lit.predicate,
                args: lit.args.iter().map(|a| env.resolve(a)).collect(),
            };
            if ctx.in_base(&lit) {
                Ok(s.contains(&lit))
            } else {
                match boundary {
                    Boundary::Strict => Err(ForcingError::DepthOverflow(lit)),
                    Boundary::Truncate => Ok(false),
                    Boundary::Optimistic => Ok(true),
                }
            }
        }
        Statement::Identity(a, b) => Ok(env.resolve(a) == env.resolve(b)),
        Statement::Distinction(a, b) => Ok(env.resolve(a) != env.resolve(b)),
        Statement::Or(children) => {
            for c in children {
                if eval_forces(s, c, env, ctx, boundary)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Statement::And(children) => {
            for c in children {
                if !eval_forces(s, c, env, ctx, boundary)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Statement::Exists(x, body) => {
            for t in ctx.universe() {
                env.bindings.push((*x, t.clone()));
                let r = eval_forces(s, body, env, ctx, boundary);
                env.bindings.pop();
                if r? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Statement::Forall(x, body) => {
            for t in ctx.universe() {
                env.bindings.push((*x, t.clone()));
                let r = eval_forces(s, body, env, ctx, boundary);
                env.bindings.pop();
                if !r? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// The forcing relation of the core semantics: identities hold between
/// syntactically identical closed terms, a literal is forced iff it is a
/// member of `S`, disjunction needs a forced disjunct, quantifiers range
/// over the context universe. An inconsistent `S` forces everything.
pub fn forces(
    s: &BTreeSet<Literal>,
    phi: &Statement,
    ctx: &GroundContext,
    boundary: Boundary,
) -> Result<bool, ForcingError> {
    if !phi.is_closed() {
        return Err(ForcingError::OpenStatement);
    }
    if let Some(l) = s.iter().find(|l| s.contains(&l.complement())) {
        let _ = l;
        return Ok(true);
    }
    eval_forces(s, phi, &mut Env { bindings: vec![] }, ctx, boundary)
}

/// Enumerates the closed instances of a statement, assigning every free
/// variable a universe term.
pub fn closed_instances(phi: &Statement, ctx: &GroundContext) -> Vec<Statement> {
    let vars: Vec<usize> = phi.free_vars().into_iter().collect();
    if vars.is_empty() {
        return vec![phi.clone()];
    }
    if ctx.universe().is_empty() {
        return vec![];
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; vars.len()];
    'outer: loop {
        let subst = crate::syntax::Substitution::from_pairs(
            vars.iter()
                .zip(&pick)
                .map(|(&v, &i)| (v, ctx.universe()[i].clone())),
        )
        .expect("universe terms are closed");
        out.push(phi.substitute(&subst));
        let mut k = pick.len();
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < ctx.universe().len() {
                break;
            }
            pick[k] = 0;
        }
    }
    out
}

/// `S ⊩ T` for a set `S` of possibly open literals and a set `T` of
/// possibly open statements: true iff `S` is inconsistent, or the closed
/// instances of `S`'s members force every closed instance of every member
/// of `T`.
pub fn forces_open(
    s: &BTreeSet<Literal>,
    t: &[Statement],
    ctx: &GroundContext,
    boundary: Boundary,
) -> Result<bool, ForcingError> {
    if !ctx.set_is_consistent(s) {
        return Ok(true);
    }
    let closed = ctx.instance_closure(s);
    for phi in t {
        for inst in closed_instances(phi, ctx) {
            if !eval_forces(&closed, &inst, &mut Env { bindings: vec![] }, ctx, boundary)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Classical truth of a statement in a standard structure: the structure
/// is completed to the full literal set (an atom's negation holds exactly
/// when the atom is absent), so statements are evaluated two-valuedly.
/// Every closed instance of `phi` must hold.
pub fn is_model(m: &StandardStructure, phi: &Statement, ctx: &GroundContext) -> bool {
    fn eval(m: &StandardStructure, phi: &Statement, env: &mut Env, ctx: &GroundContext) -> bool {
        match phi {
            Statement::Atom(p, args) => m.contains(&Literal::atom(
                p.clone(),
                args.iter().map(|a| env.resolve(a)).collect(),
            )),
            Statement::NegAtom(p, args) => !m.contains(&Literal::atom(
                p.clone(),
                args.iter().map(|a| env.resolve(a)).collect(),
            )),
            Statement::Identity(a, b) => env.resolve(a) == env.resolve(b),
            Statement::Distinction(a, b) => env.resolve(a) != env.resolve(b),
            Statement::Or(children) => children.iter().any(|c| eval(m, c, env, ctx)),
            Statement::And(children) => children.iter().all(|c| eval(m, c, env, ctx)),
            Statement::Exists(x, body) => ctx.universe().iter().any(|t| {
                env.bindings.push((*x, t.clone()));
                let r = eval(m, body, env, ctx);
                env.bindings.pop();
                r
            }),
            Statement::Forall(x, body) => ctx.universe().iter().all(|t| {
                env.bindings.push((*x, t.clone()));
                let r = eval(m, body, env, ctx);
                env.bindings.pop();
                r
            }),
        }
    }
    closed_instances(phi, ctx)
        .iter()
        .all(|inst| eval(m, inst, &mut Env { bindings: vec![] }, ctx))
}

/// Ground atoms (including out-of-base ones) occurring as literal leaves
/// once quantifiers are expanded over the universe. These are the only
/// atoms a closed statement's truth value can depend on.
fn occurring_atoms(phi: &Statement, ctx: &GroundContext, out: &mut BTreeSet<Literal>) {
    fn go(phi: &Statement, env: &mut Env, ctx: &GroundContext, out: &mut BTreeSet<Literal>) {
        match phi {
            Statement::Atom(p, args) | Statement::NegAtom(p, args) => {
                out.insert(Literal::atom(
                    p.clone(),
                    args.iter().map(|a| env.resolve(a)).collect(),
                ));
            }
            Statement::Identity(..) | Statement::Distinction(..) => {}
            Statement::Or(children) | Statement::And(children) => {
                for c in children {
                    go(c, env, ctx, out);
                }
            }
            Statement::Exists(x, body) | Statement::Forall(x, body) => {
                for t in ctx.universe() {
                    env.bindings.push((*x, t.clone()));
                    go(body, env, ctx, out);
                    env.bindings.pop();
                }
            }
        }
    }
    go(phi, &mut Env { bindings: vec![] }, ctx, out)
}

fn eval_under_assignment(
    phi: &Statement,
    truth: &BTreeMap<Literal, bool>,
    env: &mut Env,
    ctx: &GroundContext,
) -> bool {
    match phi {
        Statement::Atom(p, args) => *truth
            .get(&Literal::atom(
                p.clone(),
                args.iter().map(|a| env.resolve(a)).collect(),
            ))
            .expect("assignment covers occurring atoms"),
        Statement::NegAtom(p, args) => !*truth
            .get(&Literal::atom(
                p.clone(),
                args.iter().map(|a| env.resolve(a)).collect(),
            ))
            .expect("assignment covers occurring atoms"),
        Statement::Identity(a, b) => env.resolve(a) == env.resolve(b),
        Statement::Distinction(a, b) => env.resolve(a) != env.resolve(b),
        Statement::Or(children) => children
            .iter()
            .any(|c| eval_under_assignment(c, truth, env, ctx)),
        Statement::And(children) => children
            .iter()
            .all(|c| eval_under_assignment(c, truth, env, ctx)),
        Statement::Exists(x, body) => ctx.universe().iter().any(|t| {
            env.bindings.push((*x, t.clone()));
            let r = eval_under_assignment(body, truth, env, ctx);
            env.bindings.pop();
            r
        }),
        Statement::Forall(x, body) => ctx.universe().iter().all(|t| {
            env.bindings.push((*x, t.clone()));
            let r = eval_under_assignment(body, truth, env, ctx);
            env.bindings.pop();
            r
        }),
    }
}

pub const DEFAULT_ATOM_BUDGET: usize = 16;

/// A definite implication `body → head` in the canonical two-disjunct
/// shape `Or([∼body, head])` with an atomic head and a negation-free body.
fn parse_definite(phi: &Statement) -> Option<(Statement, Literal)> {
    let Statement::Or(children) = phi else {
        return None;
    };
    if children.len() != 2 {
        return None;
    }
    let head = children[1].as_literal().filter(|l| l.positive)?;
    let body = children[0].dual();
    let negation_free = body.occurrences().iter().all(|(_, l)| l.positive);
    negation_free.then_some((body, head))
}

fn definite_least_model(
    implications: &[(Statement, Literal)],
    ctx: &GroundContext,
) -> Result<BTreeSet<Literal>, ForcingError> {
    let mut model: BTreeSet<Literal> = BTreeSet::new();
    loop {
        let mut next = model.clone();
        for (body, head) in implications {
            let head_vars: Vec<usize> = head.free_vars().into_iter().collect();
            for inst in instantiate_over(&head_vars, ctx) {
                let head_inst = head.substitute(&inst);
                if !ctx.in_base(&head_inst) || next.contains(&head_inst) {
                    continue;
                }
                let body_inst = body.substitute(&inst);
                if forces(&model, &body_inst, ctx, Boundary::Truncate)? {
                    next.insert(head_inst);
                }
            }
        }
        if next == model {
            return Ok(model);
        }
        model = next;
    }
}

fn instantiate_over(vars: &[usize], ctx: &GroundContext) -> Vec<crate::syntax::Substitution> {
    if vars.is_empty() {
        return vec![crate::syntax::Substitution::new()];
    }
    if ctx.universe().is_empty() {
        return vec![];
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; vars.len()];
    'outer: loop {
        out.push(
            crate::syntax::Substitution::from_pairs(
                vars.iter()
                    .zip(&pick)
                    .map(|(&v, &i)| (v, ctx.universe()[i].clone())),
            )
            .expect("closed"),
        );
        let mut k = pick.len();
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < ctx.universe().len() {
                break;
            }
            pick[k] = 0;
        }
    }
    out
}

/// Logical consequence over standard structures: `T ⊨_W φ`.
///
/// Two strategies. When every member of `T` is a definite implication and
/// `φ` is an atom, consequence is least-model membership. Otherwise all
/// structures over the atoms occurring in the (instantiated) statements
/// are enumerated, which is feasible only up to `atom_budget` distinct
/// ground atoms.
pub fn entails_w(
    t: &[Statement],
    phi: &Statement,
    ctx: &GroundContext,
    atom_budget: usize,
) -> Result<bool, ForcingError> {
    let definite: Option<Vec<(Statement, Literal)>> =
        t.iter().map(parse_definite).collect();
    if let Some(implications) = definite {
        if let Some(goal) = phi.as_literal().filter(|l| l.positive && l.is_closed()) {
            let model = definite_least_model(&implications, ctx)?;
            return Ok(model.contains(&goal));
        }
    }

    // Exhaustive enumeration over occurring atoms.
    let mut instances: Vec<Statement> = Vec::new();
    for member in t {
        instances.extend(closed_instances(member, ctx));
    }
    let goal_instances = closed_instances(phi, ctx);
    let mut atoms = BTreeSet::new();
    for s in instances.iter().chain(&goal_instances) {
        occurring_atoms(s, ctx, &mut atoms);
    }
    let atoms: Vec<Literal> = atoms.into_iter().collect();
    if atoms.len() > atom_budget {
        return Err(ForcingError::Infeasible {
            atoms: atoms.len(),
            budget: atom_budget,
        });
    }
    let n = atoms.len();
    for mask in 0u64..(1u64 << n) {
        let truth: BTreeMap<Literal, bool> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), mask & (1 << i) != 0))
            .collect();
        let models_t = instances
            .iter()
            .all(|s| eval_under_assignment(s, &truth, &mut Env { bindings: vec![] }, ctx));
        if models_t {
            let models_phi = goal_instances
                .iter()
                .all(|s| eval_under_assignment(s, &truth, &mut Env { bindings: vec![] }, ctx));
            if !models_phi {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff some structure over the occurring atoms satisfies every
/// closed instance of every member of `t`.
pub fn satisfiable_w(
    t: &[Statement],
    ctx: &GroundContext,
    atom_budget: usize,
) -> Result<bool, ForcingError> {
    Ok(!entails_w(t, &Statement::falsity(), ctx, atom_budget)?)
}

/// Logical equivalence in W of two (possibly open) statements, checked
/// over all shared-variable instantiations and all structures over the
/// occurring atoms.
pub fn equivalent_w(
    a: &Statement,
    b: &Statement,
    ctx: &GroundContext,
    atom_budget: usize,
) -> Result<bool, ForcingError> {
    let vars: Vec<usize> = a
        .free_vars()
        .union(&b.free_vars())
        .copied()
        .collect();
    for subst in instantiate_over(&vars, ctx) {
        let ai = a.substitute(&subst);
        let bi = b.substitute(&subst);
        let mut atoms = BTreeSet::new();
        occurring_atoms(&ai, ctx, &mut atoms);
        occurring_atoms(&bi, ctx, &mut atoms);
        let atoms: Vec<Literal> = atoms.into_iter().collect();
        if atoms.len() > atom_budget {
            return Err(ForcingError::Infeasible {
                atoms: atoms.len(),
                budget: atom_budget,
            });
        }
        for mask in 0u64..(1u64 << atoms.len()) {
            let truth: BTreeMap<Literal, bool> = atoms
                .iter()
                .enumerate()
                .map(|(i, at)| (at.clone(), mask & (1 << i) != 0))
                .collect();
            let ta = eval_under_assignment(&ai, &truth, &mut Env { bindings: vec![] }, ctx);
            let tb = eval_under_assignment(&bi, &truth, &mut Env { bindings: vec![] }, ctx);
            if ta != tb {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Saturation, consistency and completeness of a literal set relative to
/// the ground base.
pub fn saturation_and_completeness(
    s: &BTreeSet<Literal>,
    ctx: &GroundContext,
) -> (bool, bool, bool) {
    let saturated = ctx.atoms().iter().all(|a| {
        s.iter().any(|l| {
            l.predicate == a.predicate
                && crate::syntax::literal_is_instance(
                    &Literal::atom(a.predicate.clone(), a.args.clone()),
                    &Literal::atom(l.predicate.clone(), l.args.clone()),
                )
        })
    });
    let consistent = ctx.set_is_consistent(s);
    (saturated, consistent, saturated && consistent)
}

/// True iff the closed literal is an instance of some member of the set.
pub fn instance_of_member(lit: &Literal, set: &BTreeSet<Literal>) -> bool {
    set.iter().any(|pattern| literal_is_instance(lit, pattern))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Substitution;

    fn nat_vocab() -> Vocabulary {
        Vocabulary::with([("0", 0), ("s", 1)], [("p", 1), ("q", 0)]).unwrap()
    }

    fn num(n: usize) -> Term {
        Term::numeral(n, "0", "s")
    }

    #[test]
    fn universe_is_the_depth_bounded_term_set() {
        let ctx = GroundContext::new(nat_vocab(), 3);
        assert_eq!(ctx.universe().len(), 4);
        assert_eq!(ctx.universe()[0], num(0));
        assert_eq!(ctx.universe()[3], num(3));
        // 4 unary instances + 1 nullary
        assert_eq!(ctx.atoms().len(), 5);
    }

    #[test]
    fn empty_conjunction_is_true_empty_disjunction_is_false() {
        let ctx = GroundContext::new(nat_vocab(), 2);
        let empty = BTreeSet::new();
        assert_eq!(
            forces(&empty, &Statement::truth(), &ctx, Boundary::Strict),
            Ok(true)
        );
        assert_eq!(
            forces(&empty, &Statement::falsity(), &ctx, Boundary::Strict),
            Ok(false)
        );
    }

    #[test]
    fn identity_is_syntactic() {
        let ctx = GroundContext::new(nat_vocab(), 2);
        let empty = BTreeSet::new();
        let same = Statement::Identity(num(1), num(1));
        let diff = Statement::Identity(num(0), num(1));
        assert_eq!(forces(&empty, &same, &ctx, Boundary::Strict), Ok(true));
        assert_eq!(forces(&empty, &diff, &ctx, Boundary::Strict), Ok(false));
    }

    #[test]
    fn disjunction_needs_a_forced_member() {
        let ctx = GroundContext::new(nat_vocab(), 2);
        let s: BTreeSet<Literal> = [Literal::prop("q")].into_iter().collect();
        let phi = Statement::Or(vec![
            Statement::Atom("q".into(), vec![]),
            Statement::Atom("p".into(), vec![num(0)]),
        ]);
        assert_eq!(forces(&s, &phi, &ctx, Boundary::Strict), Ok(true));
        let empty = BTreeSet::new();
        assert_eq!(forces(&empty, &phi, &ctx, Boundary::Strict), Ok(false));
    }

    #[test]
    fn inconsistent_sets_force_everything() {
        let ctx = GroundContext::new(nat_vocab(), 2);
        let s: BTreeSet<Literal> = [Literal::prop("q"), Literal::neg_prop("q")]
            .into_iter()
            .collect();
        assert_eq!(
            forces(&s, &Statement::falsity(), &ctx, Boundary::Strict),
            Ok(true)
        );
        assert_eq!(
            forces_open(&s, &[Statement::falsity()], &ctx, Boundary::Strict),
            Ok(true)
        );
    }

    #[test]
    fn depth_overflow_is_distinct_from_false() {
        let ctx = GroundContext::new(nat_vocab(), 2);
        let empty = BTreeSet::new();
        let deep = Statement::Atom("p".into(), vec![num(5)]);
        assert_eq!(
            forces(&empty, &deep, &ctx, Boundary::Strict),
            Err(ForcingError::DepthOverflow(Literal::atom("p", vec![num(5)])))
        );
        assert_eq!(forces(&empty, &deep, &ctx, Boundary::Truncate), Ok(false));
        assert_eq!(forces(&empty, &deep, &ctx, Boundary::Optimistic), Ok(true));
    }

    #[test]
    fn forces_open_takes_instance_closures() {
        let ctx = GroundContext::new(nat_vocab(), 3);
        let s: BTreeSet<Literal> = [Literal::atom("p", vec![Term::var(1)])]
            .into_iter()
            .collect();
        let t = [Statement::Atom("p".into(), vec![num(2)])];
        assert_eq!(forces_open(&s, &t, &ctx, Boundary::Strict), Ok(true));

        let small = GroundContext::new(nat_vocab(), 1);
        let s: BTreeSet<Literal> = [Literal::atom("p", vec![num(0)])].into_iter().collect();
        let t = [Statement::Forall(
            0,
            Box::new(Statement::Atom("p".into(), vec![Term::var(0)])),
        )];
        assert_eq!(forces_open(&s, &t, &small, Boundary::Strict), Ok(false));
    }

    #[test]
    fn quantifiers_range_over_the_universe() {
        let ctx = GroundContext::new(nat_vocab(), 2);
        let s: BTreeSet<Literal> = [Literal::atom("p", vec![num(0)])].into_iter().collect();
        let exists = Statement::Exists(0, Box::new(Statement::Atom("p".into(), vec![Term::var(0)])));
        assert_eq!(forces(&s, &exists, &ctx, Boundary::Strict), Ok(true));
        let forall = Statement::Forall(0, Box::new(Statement::Atom("p".into(), vec![Term::var(0)])));
        assert_eq!(forces(&s, &forall, &ctx, Boundary::Strict), Ok(false));
    }

    #[test]
    fn model_checking_completes_the_structure() {
        let ctx = GroundContext::new(nat_vocab(), 2);
        let m: StandardStructure = [Literal::prop("q")].into_iter().collect();
        let taut = Statement::Or(vec![
            Statement::Atom("q".into(), vec![]),
            Statement::NegAtom("q".into(), vec![]),
        ]);
        assert!(is_model(&m, &taut, &ctx));
        let empty = StandardStructure::empty();
        assert!(is_model(&empty, &Statement::NegAtom("q".into(), vec![]), &ctx));
        let m: StandardStructure = [Literal::atom("p", vec![num(0)])].into_iter().collect();
        let exists = Statement::Exists(0, Box::new(Statement::Atom("p".into(), vec![Term::var(0)])));
        assert!(is_model(&m, &exists, &ctx));
    }

    #[test]
    fn entailment_basic_cases() {
        let vocab =
            Vocabulary::with([] as [(&str, usize); 0], [("a", 0), ("b", 0)]).unwrap();
        let pctx = GroundContext::new(vocab, 0);
        // {a -> b, a} |= b; the fact a is Or([false, a]).
        let t = vec![
            Statement::Or(vec![
                Statement::NegAtom("a".into(), vec![]),
                Statement::Atom("b".into(), vec![]),
            ]),
            Statement::Or(vec![Statement::falsity(), Statement::Atom("a".into(), vec![])]),
        ];
        assert_eq!(
            entails_w(&t, &Statement::Atom("b".into(), vec![]), &pctx, DEFAULT_ATOM_BUDGET),
            Ok(true)
        );
        // The all-false structure models the empty theory.
        let ctx = GroundContext::new(nat_vocab(), 1);
        assert_eq!(
            entails_w(&[], &Statement::Atom("q".into(), vec![]), &ctx, DEFAULT_ATOM_BUDGET),
            Ok(false)
        );
    }

    #[test]
    fn definite_route_agrees_with_enumeration() {
        let vocab = Vocabulary::with([] as [(&str, usize); 0], [("a", 0), ("b", 0), ("c", 0)])
            .unwrap();
        let ctx = GroundContext::new(vocab, 0);
        // a., b <- a, c <- b ∧ a
        let t = vec![
            Statement::Or(vec![Statement::falsity(), Statement::Atom("a".into(), vec![])]),
            Statement::Or(vec![
                Statement::NegAtom("a".into(), vec![]),
                Statement::Atom("b".into(), vec![]),
            ]),
            Statement::Or(vec![
                Statement::Or(vec![
                    Statement::NegAtom("b".into(), vec![]),
                    Statement::NegAtom("a".into(), vec![]),
                ]),
                Statement::Atom("c".into(), vec![]),
            ]),
        ];
        for goal in ["a", "b", "c"] {
            let phi = Statement::Atom(goal.into(), vec![]);
            let definite = entails_w(&t, &phi, &ctx, DEFAULT_ATOM_BUDGET).unwrap();
            // Force the exhaustive route by appending a non-definite tautology.
            let mut t2 = t.clone();
            t2.push(Statement::truth());
            let exhaustive = entails_w(&t2, &phi, &ctx, DEFAULT_ATOM_BUDGET).unwrap();
            assert_eq!(definite, exhaustive, "goal {goal}");
        }
    }

    #[test]
    fn saturation_cases() {
        let vocab = Vocabulary::with([] as [(&str, usize); 0], [("a", 0), ("b", 0)]).unwrap();
        let ctx = GroundContext::new(vocab, 0);
        let s: BTreeSet<Literal> = [Literal::prop("a"), Literal::neg_prop("a")]
            .into_iter()
            .collect();
        let vocab_a = Vocabulary::with([] as [(&str, usize); 0], [("a", 0)]).unwrap();
        let ctx_a = GroundContext::new(vocab_a, 0);
        assert_eq!(saturation_and_completeness(&s, &ctx_a), (true, false, false));

        let s: BTreeSet<Literal> = [Literal::prop("a")].into_iter().collect();
        assert_eq!(saturation_and_completeness(&s, &ctx), (false, true, false));

        let s: BTreeSet<Literal> = [Literal::prop("a"), Literal::neg_prop("b")]
            .into_iter()
            .collect();
        assert_eq!(saturation_and_completeness(&s, &ctx), (true, true, true));
    }

    #[test]
    fn substitution_helpers_are_consistent() {
        let ctx = GroundContext::new(nat_vocab(), 2);
        let pattern = Literal::atom("p", vec![Term::var(0)]);
        let instances = ctx.instances_of(&pattern);
        assert_eq!(instances.len(), 3);
        let subst = Substitution::from_pairs([(0, num(1))]).unwrap();
        assert!(instances.contains(&pattern.substitute(&subst)));
    }
}
