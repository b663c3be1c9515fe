//! Contextual-hypothesis machinery: unif-sets, the restricting and
//! relaxing rewrites on marked literal occurrences, whole-program
//! transforms, and marker advancement.
//!
//! Given a set `E` of hypothesis literals and a set of marked occurrences,
//! [`restrict`] makes every marked occurrence false unless it subsumes a
//! member of `E`, and [`relax`] makes it true if it does. Relaxing places
//! the original literal at child index 0 of its replacement disjunction,
//! so a marked occurrence can be tracked through repeated transformation
//! by appending 0 to its path ([`marker_advance`]).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::forcing::GroundContext;
use crate::program::{FormalLogicProgram, LiteralMarker, ProgramError};
use crate::syntax::{Literal, OccurrencePath, Statement, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("path {0:?} does not address a literal occurrence")]
    InvalidPath(Vec<usize>),
    #[error(transparent)]
    Program(#[from] ProgramError),
}

/// A finite set of (possibly open) hypothesis literals. The set need not
/// be consistent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct HypothesisSet(BTreeSet<Literal>);

impl HypothesisSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Self {
        HypothesisSet(lits.into_iter().collect())
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

    pub fn contains(&self, lit: &Literal) -> bool {
        self.0.contains(lit)
    }

    /// True iff the closed literal is an instance of some member.
    pub fn subsumes(&self, lit: &Literal) -> bool {
        self.0
            .iter()
            .any(|member| crate::syntax::literal_is_instance(lit, member))
    }

    pub fn union(&self, other: &HypothesisSet) -> HypothesisSet {
        HypothesisSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn insert(&mut self, lit: Literal) {
        self.0.insert(lit);
    }

    pub fn as_set(&self) -> &BTreeSet<Literal> {
        &self.0
    }

    /// Closed in-base instances of all members.
    pub fn ground_restriction(&self, ctx: &GroundContext) -> BTreeSet<Literal> {
        ctx.instance_closure(&self.0)
    }

    pub fn is_consistent(&self, ctx: &GroundContext) -> bool {
        ctx.set_is_consistent(&self.0)
    }
}

impl FromIterator<Literal> for HypothesisSet {
    fn from_iter<T: IntoIterator<Item = Literal>>(iter: T) -> Self {
        HypothesisSet(iter.into_iter().collect())
    }
}

impl From<BTreeSet<Literal>> for HypothesisSet {
    fn from(set: BTreeSet<Literal>) -> Self {
        HypothesisSet(set)
    }
}

fn unify_terms(pairs: &mut Vec<(Term, Term)>) -> Option<BTreeMap<usize, Term>> {
    let mut subst: BTreeMap<usize, Term> = BTreeMap::new();

    fn resolve(t: &Term, subst: &BTreeMap<usize, Term>) -> Term {
        match t {
            Term::Var(i) => match subst.get(i) {
                Some(bound) => resolve(bound, subst),
                None => t.clone(),
            },
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| resolve(a, subst)).collect(),
            ),
        }
    }

    fn occurs(v: usize, t: &Term) -> bool {
        match t {
            Term::Var(i) => *i == v,
            Term::App(_, args) => args.iter().any(|a| occurs(v, a)),
        }
    }

    while let Some((a, b)) = pairs.pop() {
        let a = resolve(&a, &subst);
        let b = resolve(&b, &subst);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if occurs(x, &t) {
                    return None;
                }
                subst.insert(x, t);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                pairs.extend(fa.into_iter().zip(ga));
            }
        }
    }
    // Fully resolve the bindings.
    let keys: Vec<usize> = subst.keys().copied().collect();
    let mut resolved = BTreeMap::new();
    for k in keys {
        resolved.insert(k, resolve(&Term::Var(k), &subst));
    }
    Some(resolved)
}

fn max_var(t: &Term) -> usize {
    match t {
        Term::Var(i) => *i + 1,
        Term::App(_, args) => args.iter().map(max_var).max().unwrap_or(0),
    }
}

fn shift_vars(t: &Term, offset: usize) -> Term {
    match t {
        Term::Var(i) => Term::Var(i + offset),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| shift_vars(a, offset)).collect(),
        ),
    }
}

fn identity_conjunction(pairs: Vec<(usize, Term)>) -> Statement {
    let mut children: Vec<Statement> = pairs
        .into_iter()
        .map(|(v, t)| Statement::Identity(Term::var(v), t))
        .collect();
    if children.len() == 1 {
        children.pop().expect("nonempty")
    } else {
        Statement::And(children)
    }
}

/// All substitutions through which `phi` subsumes a member of `e`, as
/// identity conjunctions over `phi`'s free variables with the member's
/// residual variables renamed fresh and existentially closed. One
/// disjunct per member that unifies with `phi`; structural duplicates are
/// dropped.
pub fn unif(phi: &Literal, e: &HypothesisSet) -> Vec<Statement> {
    let xs: Vec<usize> = phi.free_vars().into_iter().collect();
    let offset = phi.args.iter().map(max_var).max().unwrap_or(0);
    let mut out: Vec<Statement> = Vec::new();
    for member in e.iter() {
        if member.positive != phi.positive
            || member.predicate != phi.predicate
            || member.args.len() != phi.args.len()
        {
            continue;
        }
        let mut pairs: Vec<(Term, Term)> = phi
            .args
            .iter()
            .zip(&member.args)
            .map(|(a, b)| (a.clone(), shift_vars(b, offset)))
            .collect();
        let Some(mgu) = unify_terms(&mut pairs) else {
            continue;
        };
        let images: Vec<Term> = xs
            .iter()
            .map(|x| mgu.get(x).cloned().unwrap_or(Term::Var(*x)))
            .collect();
        // Residual member-side variables, renamed to the lowest indices
        // outside phi's free variables, in order of first appearance.
        let mut residual: Vec<usize> = Vec::new();
        for img in &images {
            let mut vs = BTreeSet::new();
            img.vars(&mut vs);
            for v in vs {
                if v >= offset && !residual.contains(&v) {
                    residual.push(v);
                }
            }
        }
        let mut fresh = (0usize..).filter(|i| !xs.contains(i));
        let rename: BTreeMap<usize, usize> = residual
            .iter()
            .map(|&v| (v, fresh.next().expect("infinite supply")))
            .collect();
        fn apply_rename(t: &Term, map: &BTreeMap<usize, usize>) -> Term {
            match t {
                Term::Var(i) => Term::Var(map.get(i).copied().unwrap_or(*i)),
                Term::App(f, args) => Term::App(
                    f.clone(),
                    args.iter().map(|a| apply_rename(a, map)).collect(),
                ),
            }
        }
        let images: Vec<Term> = images.iter().map(|t| apply_rename(t, &rename)).collect();
        let mut disjunct = if xs.is_empty() {
            Statement::truth()
        } else {
            identity_conjunction(xs.iter().copied().zip(images).collect())
        };
        let bound: Vec<usize> = residual.iter().map(|v| rename[v]).collect();
        for b in bound.into_iter().rev() {
            if disjunct.free_vars().contains(&b) {
                disjunct = Statement::Exists(b, Box::new(disjunct));
            }
        }
        if !out.contains(&disjunct) {
            out.push(disjunct);
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Restrict,
    Relax,
}

fn rewrite(
    phi: &Statement,
    paths: &[&[usize]],
    e: &HypothesisSet,
    mode: Mode,
    trail: &mut Vec<usize>,
) -> Result<Statement, TransformError> {
    if paths.is_empty() {
        return Ok(phi.clone());
    }
    if paths.iter().any(|p| p.is_empty()) {
        let Some(lit) = phi.as_literal() else {
            let mut bad = trail.clone();
            if let Some(p) = paths.iter().find(|p| !p.is_empty()) {
                bad.extend(p.iter());
            }
            return Err(TransformError::InvalidPath(bad));
        };
        let mut children = match mode {
            Mode::Restrict => Vec::new(),
            Mode::Relax => vec![phi.clone()],
        };
        children.extend(unif(&lit, e));
        return Ok(Statement::Or(children));
    }
    let descend = |children: &[Statement],
                   trail: &mut Vec<usize>|
     -> Result<Vec<Statement>, TransformError> {
        children
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let sub: Vec<&[usize]> = paths
                    .iter()
                    .filter(|p| p[0] == i)
                    .map(|p| &p[1..])
                    .collect();
                trail.push(i);
                let r = rewrite(c, &sub, e, mode, trail);
                trail.pop();
                r
            })
            .collect()
    };
    match phi {
        Statement::Or(children) => {
            let out = descend(children, trail)?;
            if out.len() == children.len()
                && paths.iter().all(|p| p[0] < children.len())
            {
                Ok(Statement::Or(out))
            } else {
                report_stray(paths, children.len(), trail)
            }
        }
        Statement::And(children) => {
            let out = descend(children, trail)?;
            if paths.iter().all(|p| p[0] < children.len()) {
                Ok(Statement::And(out))
            } else {
                report_stray(paths, children.len(), trail)
            }
        }
        Statement::Exists(x, body) => {
            let sub = quantifier_paths(paths, trail)?;
            trail.push(0);
            let r = rewrite(body, &sub, e, mode, trail);
            trail.pop();
            Ok(Statement::Exists(*x, Box::new(r?)))
        }
        Statement::Forall(x, body) => {
            let sub = quantifier_paths(paths, trail)?;
            trail.push(0);
            let r = rewrite(body, &sub, e, mode, trail);
            trail.pop();
            Ok(Statement::Forall(*x, Box::new(r?)))
        }
        _ => {
            let mut bad = trail.clone();
            bad.extend(paths[0].iter());
            Err(TransformError::InvalidPath(bad))
        }
    }
}

fn report_stray(
    paths: &[&[usize]],
    len: usize,
    trail: &[usize],
) -> Result<Statement, TransformError> {
    let stray = paths.iter().find(|p| p[0] >= len).expect("stray path");
    let mut bad = trail.to_vec();
    bad.extend(stray.iter());
    Err(TransformError::InvalidPath(bad))
}

fn quantifier_paths<'a>(
    paths: &[&'a [usize]],
    trail: &[usize],
) -> Result<Vec<&'a [usize]>, TransformError> {
    if let Some(stray) = paths.iter().find(|p| p[0] != 0) {
        let mut bad = trail.to_vec();
        bad.extend(stray.iter());
        return Err(TransformError::InvalidPath(bad));
    }
    Ok(paths.iter().map(|p| &p[1..]).collect())
}

fn run_rewrite(
    phi: &Statement,
    marks: &BTreeSet<OccurrencePath>,
    e: &HypothesisSet,
    mode: Mode,
) -> Result<Statement, TransformError> {
    let paths: Vec<&[usize]> = marks.iter().map(|p| p.0.as_slice()).collect();
    rewrite(phi, &paths, e, mode, &mut Vec::new())
}

/// The restricting rewrite: every marked literal occurrence becomes the
/// disjunction of its unif-set, so it is false unless it subsumes a
/// member of `e`.
pub fn restrict(
    phi: &Statement,
    marks: &BTreeSet<OccurrencePath>,
    e: &HypothesisSet,
) -> Result<Statement, TransformError> {
    run_rewrite(phi, marks, e, Mode::Restrict)
}

/// The relaxing rewrite: every marked literal occurrence `ψ` becomes
/// `Or([ψ] ++ unif(ψ, e))`, so it is true if it subsumes a member of `e`.
/// The original literal sits at child index 0.
pub fn relax(
    phi: &Statement,
    marks: &BTreeSet<OccurrencePath>,
    e: &HypothesisSet,
) -> Result<Statement, TransformError> {
    run_rewrite(phi, marks, e, Mode::Relax)
}

/// Applies [`restrict`] bodywise with the per-predicate mark sets.
pub fn program_restrict(
    program: &FormalLogicProgram,
    marker: &LiteralMarker,
    e: &HypothesisSet,
) -> Result<FormalLogicProgram, TransformError> {
    transform_program(program, marker, e, Mode::Restrict)
}

/// Applies [`relax`] bodywise with the per-predicate mark sets.
pub fn program_relax(
    program: &FormalLogicProgram,
    marker: &LiteralMarker,
    e: &HypothesisSet,
) -> Result<FormalLogicProgram, TransformError> {
    transform_program(program, marker, e, Mode::Relax)
}

fn transform_program(
    program: &FormalLogicProgram,
    marker: &LiteralMarker,
    e: &HypothesisSet,
    mode: Mode,
) -> Result<FormalLogicProgram, TransformError> {
    marker.validate(program)?;
    let mut entries = Vec::new();
    for (pred, pos, neg) in program.rules() {
        let pos = run_rewrite(pos, &marker.positive_marks(pred), e, mode)?;
        let neg = run_rewrite(neg, &marker.negative_marks(pred), e, mode)?;
        entries.push((pred.to_string(), (pos, neg)));
    }
    Ok(FormalLogicProgram::new(
        program.vocabulary().clone(),
        entries,
    )?)
}

/// The two standard markers: one marking all occurrences of negated atoms
/// in every body, one marking all occurrences of literals.
pub fn standard_markers(program: &FormalLogicProgram) -> (LiteralMarker, LiteralMarker) {
    let mut neg_only = LiteralMarker::empty();
    let mut all = LiteralMarker::empty();
    for (pred, pos, neg) in program.rules() {
        for (path, lit) in pos.occurrences() {
            if !lit.positive {
                neg_only.insert_positive(pred, path.clone());
            }
            all.insert_positive(pred, path);
        }
        for (path, lit) in neg.occurrences() {
            if !lit.positive {
                neg_only.insert_negative(pred, path.clone());
            }
            all.insert_negative(pred, path);
        }
    }
    (neg_only, all)
}

/// The marker addressing the same literals in a relaxed program: every
/// marked path gains a trailing 0, pointing at the original literal
/// inside its replacement disjunction.
pub fn marker_advance(marker: &LiteralMarker, program: &FormalLogicProgram) -> LiteralMarker {
    let mut advanced = LiteralMarker::empty();
    for pred in program.predicates() {
        for path in marker.positive_marks(pred) {
            advanced.insert_positive(pred, path.child(0));
        }
        for path in marker.negative_marks(pred) {
            advanced.insert_negative(pred, path.child(0));
        }
    }
    advanced
}
