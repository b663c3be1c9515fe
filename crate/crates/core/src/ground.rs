//! Internal ground compilation of program bodies.
//!
//! Fixpoint computations evaluate the same bodies thousands of times, so
//! bodies are compiled once per (program, context) pair: head frames are
//! instantiated over the universe, quantifiers are expanded, identities and
//! distinctions are folded to constants, and literal leaves become indices
//! into the ground literal base. Marked leaves stay intact and are resolved
//! against a hypothesis bitset at evaluation time, which implements the
//! restricting and relaxing rewrites for ground hypothesis sets without
//! rebuilding any syntax.

use std::collections::BTreeSet;

use crate::forcing::GroundContext;
use crate::program::{FormalLogicProgram, LiteralMarker};
use crate::syntax::{Literal, Statement, Term};

/// Bitset over the ground literal base: atom `i` holds ids `2i` (positive)
/// and `2i + 1` (negative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LitSet {
    words: Vec<u64>,
    nbits: usize,
}

impl LitSet {
    pub fn empty(nbits: usize) -> Self {
        LitSet {
            words: vec![0; nbits.div_ceil(64)],
            nbits,
        }
    }

    pub fn full(nbits: usize) -> Self {
        let mut s = Self::empty(nbits);
        for i in 0..nbits {
            s.insert(i as u32);
        }
        s
    }

    pub fn get(&self, id: u32) -> bool {
        let id = id as usize;
        debug_assert!(id < self.nbits);
        self.words[id / 64] & (1 << (id % 64)) != 0
    }

    pub fn insert(&mut self, id: u32) {
        let id = id as usize;
        self.words[id / 64] |= 1 << (id % 64);
    }

    pub fn remove(&mut self, id: u32) {
        let id = id as usize;
        self.words[id / 64] &= !(1 << (id % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &LitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &LitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.nbits as u32).filter(|&i| self.get(i))
    }

    /// No atom appears together with its negation.
    pub fn is_consistent(&self) -> bool {
        self.words.iter().all(|w| {
            let pos = w & 0x5555_5555_5555_5555;
            let neg = w & 0xAAAA_AAAA_AAAA_AAAA;
            pos & (neg >> 1) == 0
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OutMode {
    /// Out-of-base leaves are never forced: least-fixpoint reading.
    Unforced,
    /// Out-of-base leaves are always forced: greatest-fixpoint reading,
    /// approximating the unbounded base from above.
    Forced,
}

/// How marked leaves are resolved during evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) enum MarkMode<'a> {
    /// No hypothesis set: marked leaves behave like plain leaves.
    Plain,
    /// Restricting rewrite: a marked leaf is true iff it lies in the
    /// hypothesis set.
    Restrict(&'a LitSet),
    /// Relaxing rewrite: a marked leaf is true iff it is in the current
    /// set or in the hypothesis set.
    Relax(&'a LitSet),
}

#[derive(Debug, Clone, Copy)]
enum Node {
    True,
    False,
    Lit { id: u32, marked: bool },
    OutLit { marked: bool },
    And { start: u32, end: u32 },
    Or { start: u32, end: u32 },
}

/// A program compiled over a ground context: one body per ground literal.
#[derive(Debug, Clone)]
pub(crate) struct GroundProgram {
    nbits: usize,
    bodies: Vec<u32>,
    nodes: Vec<Node>,
    children: Vec<u32>,
}

pub(crate) fn lit_id(ctx: &GroundContext, lit: &Literal) -> Option<u32> {
    ctx.atom_position(lit)
        .map(|pos| (2 * pos + usize::from(!lit.positive)) as u32)
}

pub(crate) fn id_literal(ctx: &GroundContext, id: u32) -> Literal {
    let atom = &ctx.atoms()[id as usize / 2];
    if id % 2 == 0 {
        atom.clone()
    } else {
        atom.complement()
    }
}

pub(crate) fn set_of_literals<'a>(
    ctx: &GroundContext,
    lits: impl IntoIterator<Item = &'a Literal>,
) -> LitSet {
    let mut s = LitSet::empty(2 * ctx.atoms().len());
    for l in lits {
        if let Some(id) = lit_id(ctx, l) {
            s.insert(id);
        }
    }
    s
}

pub(crate) fn literals_of_set(ctx: &GroundContext, s: &LitSet) -> BTreeSet<Literal> {
    s.ids().map(|id| id_literal(ctx, id)).collect()
}

struct Compiler<'a> {
    ctx: &'a GroundContext,
    nodes: Vec<Node>,
    children: Vec<u32>,
}

impl Compiler<'_> {
    fn resolve(&self, t: &Term, env: &[(usize, Term)]) -> Term {
        match t {
            Term::Var(i) => env
                .iter()
                .rev()
                .find(|(v, _)| v == i)
                .map(|(_, bound)| bound.clone())
                .unwrap_or_else(|| Term::Var(*i)),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| self.resolve(a, env)).collect(),
            ),
        }
    }

    fn push(&mut self, node: Node) -> u32 {
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    fn junction(&mut self, compiled: Vec<u32>, disjunctive: bool) -> u32 {
        match compiled.len() {
            0 => self.push(if disjunctive { Node::False } else { Node::True }),
            1 => compiled[0],
            _ => {
                let start = self.children.len() as u32;
                self.children.extend(compiled);
                let end = self.children.len() as u32;
                self.push(if disjunctive {
                    Node::Or { start, end }
                } else {
                    Node::And { start, end }
                })
            }
        }
    }

    fn compile(
        &mut self,
        stmt: &Statement,
        paths: &[&[usize]],
        env: &mut Vec<(usize, Term)>,
    ) -> u32 {
        match stmt {
            Statement::Atom(..) | Statement::NegAtom(..) => {
                let lit = stmt.as_literal().expect("literal");
                let lit = Literal {
                    positive: lit.positive,
                    predicate: lit.predicate,
                    args: lit.args.iter().map(|a| self.resolve(a, env)).collect(),
                };
                let marked = paths.iter().any(|p| p.is_empty());
                match lit_id(self.ctx, &lit) {
                    Some(id) => self.push(Node::Lit { id, marked }),
                    None => self.push(Node::OutLit { marked }),
                }
            }
            Statement::Identity(a, b) => {
                if self.resolve(a, env) == self.resolve(b, env) {
                    self.push(Node::True)
                } else {
                    self.push(Node::False)
                }
            }
            Statement::Distinction(a, b) => {
                if self.resolve(a, env) != self.resolve(b, env) {
                    self.push(Node::True)
                } else {
                    self.push(Node::False)
                }
            }
            Statement::Or(parts) | Statement::And(parts) => {
                let disjunctive = matches!(stmt, Statement::Or(_));
                let mut compiled = Vec::with_capacity(parts.len());
                for (i, c) in parts.iter().enumerate() {
                    let sub: Vec<&[usize]> = paths
                        .iter()
                        .filter(|p| !p.is_empty() && p[0] == i)
                        .map(|p| &p[1..])
                        .collect();
                    let node = self.compile(c, &sub, env);
                    match self.nodes[node as usize] {
                        Node::True if disjunctive => return self.push(Node::True),
                        Node::False if !disjunctive => return self.push(Node::False),
                        Node::True | Node::False => {}
                        _ => compiled.push(node),
                    }
                }
                self.junction(compiled, disjunctive)
            }
            Statement::Exists(x, body) | Statement::Forall(x, body) => {
                let disjunctive = matches!(stmt, Statement::Exists(..));
                let sub: Vec<&[usize]> = paths
                    .iter()
                    .filter(|p| !p.is_empty() && p[0] == 0)
                    .map(|p| &p[1..])
                    .collect();
                let mut compiled = Vec::new();
                for t in self.ctx.universe().to_vec() {
                    env.push((*x, t));
                    let node = self.compile(body, &sub, env);
                    env.pop();
                    match self.nodes[node as usize] {
                        Node::True if disjunctive => return self.push(Node::True),
                        Node::False if !disjunctive => return self.push(Node::False),
                        Node::True | Node::False => {}
                        _ => compiled.push(node),
                    }
                }
                self.junction(compiled, disjunctive)
            }
        }
    }
}

impl GroundProgram {
    /// Compiles every ground instance of every body. Marker paths, when
    /// given, flag the corresponding leaves for [`MarkMode`] resolution.
    pub fn compile(
        program: &FormalLogicProgram,
        marker: Option<&LiteralMarker>,
        ctx: &GroundContext,
    ) -> GroundProgram {
        let nbits = 2 * ctx.atoms().len();
        let mut compiler = Compiler {
            ctx,
            nodes: Vec::new(),
            children: Vec::new(),
        };
        let mut bodies = vec![0u32; nbits];
        for (pos, atom) in ctx.atoms().iter().enumerate() {
            let (pos_body, neg_body) = program
                .bodies(&atom.predicate)
                .expect("program covers the vocabulary");
            for (polarity, body) in [(true, pos_body), (false, neg_body)] {
                let marks: BTreeSet<_> = match marker {
                    Some(m) if polarity => m.positive_marks(&atom.predicate),
                    Some(m) => m.negative_marks(&atom.predicate),
                    None => BTreeSet::new(),
                };
                let paths: Vec<&[usize]> = marks.iter().map(|p| p.0.as_slice()).collect();
                let mut env: Vec<(usize, Term)> = atom
                    .args
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (i + 1, t.clone()))
                    .collect();
                let root = compiler.compile(body, &paths, &mut env);
                let id = 2 * pos + usize::from(!polarity);
                bodies[id] = root;
            }
        }
        GroundProgram {
            nbits,
            bodies,
            nodes: compiler.nodes,
            children: compiler.children,
        }
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    fn eval(&self, node: u32, s: &LitSet, mark: MarkMode<'_>, out: OutMode) -> bool {
        match self.nodes[node as usize] {
            Node::True => true,
            Node::False => false,
            Node::Lit { id, marked } => {
                if marked {
                    match mark {
                        MarkMode::Plain => s.get(id),
                        MarkMode::Restrict(e) => e.get(id),
                        MarkMode::Relax(e) => s.get(id) || e.get(id),
                    }
                } else {
                    s.get(id)
                }
            }
            // A ground in-base hypothesis set never covers an out-of-base
            // leaf, so marking adds nothing beyond the boundary reading.
            Node::OutLit { .. } => matches!(out, OutMode::Forced),
            Node::And { start, end } => {
                (start..end).all(|i| self.eval(self.children[i as usize], s, mark, out))
            }
            Node::Or { start, end } => {
                (start..end).any(|i| self.eval(self.children[i as usize], s, mark, out))
            }
        }
    }

    /// Evaluates the body of one ground literal against a literal set.
    pub fn body_holds(&self, lit: u32, s: &LitSet, mark: MarkMode<'_>, out: OutMode) -> bool {
        self.eval(self.bodies[lit as usize], s, mark, out)
    }

    /// The least fixpoint of rule firing: a literal enters a stage when
    /// its body is forced by the previous stage. The trace, if requested,
    /// records every stage including the repeated final one. An
    /// inconsistent accumulation forces everything.
    pub fn least_fixpoint(
        &self,
        mark: MarkMode<'_>,
        mut trace: Option<&mut Vec<LitSet>>,
    ) -> LitSet {
        let mut current = LitSet::empty(self.nbits);
        loop {
            let next = if !current.is_consistent() {
                LitSet::full(self.nbits)
            } else {
                let mut next = LitSet::empty(self.nbits);
                for id in 0..self.nbits as u32 {
                    if self.body_holds(id, &current, mark, OutMode::Unforced) {
                        next.insert(id);
                    }
                }
                next
            };
            if let Some(t) = trace.as_deref_mut() {
                t.push(next.clone());
            }
            if next == current {
                return current;
            }
            current = next;
        }
    }

    /// The greatest subset of `candidates` closed under the keep condition
    /// "own body forced by `base ∪ X`", with out-of-base leaves read
    /// optimistically.
    pub fn greatest_supported(
        &self,
        candidates: &LitSet,
        base: &LitSet,
        mark: MarkMode<'_>,
    ) -> LitSet {
        let mut x = candidates.clone();
        loop {
            let mut joint = base.clone();
            joint.union_with(&x);
            let mut next = LitSet::empty(self.nbits);
            for id in x.ids() {
                if self.body_holds(id, &joint, mark, OutMode::Forced) {
                    next.insert(id);
                }
            }
            if next == x {
                return x;
            }
            x = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{num, parity_program};
    use crate::forcing::{forces, Boundary};

    #[test]
    fn compiled_bodies_agree_with_tree_walking_forces() {
        let program = parity_program();
        let ctx = GroundContext::new(program.vocabulary().clone(), 5);
        let gp = GroundProgram::compile(&program, None, &ctx);
        let sets: Vec<BTreeSet<Literal>> = vec![
            BTreeSet::new(),
            [Literal::atom("p1", vec![num(0)]), Literal::prop("q2")]
                .into_iter()
                .collect(),
            [
                Literal::atom("p3", vec![num(0)]),
                Literal::neg_atom("p3", vec![num(1)]),
                Literal::prop("q1"),
            ]
            .into_iter()
            .collect(),
        ];
        for set in sets {
            let bits = set_of_literals(&ctx, set.iter());
            for (pos, atom) in ctx.atoms().iter().enumerate() {
                for (polarity, body) in [
                    (true, program.positive_body(&atom.predicate)),
                    (false, program.negative_body(&atom.predicate)),
                ] {
                    let subst = crate::syntax::Substitution::from_pairs(
                        atom.args
                            .iter()
                            .enumerate()
                            .map(|(i, t)| (i + 1, t.clone())),
                    )
                    .unwrap();
                    let inst = body.substitute(&subst);
                    let expected = forces(&set, &inst, &ctx, Boundary::Truncate).unwrap();
                    let id = (2 * pos + usize::from(!polarity)) as u32;
                    let got = gp.body_holds(id, &bits, MarkMode::Plain, OutMode::Unforced);
                    assert_eq!(got, expected, "{polarity} body of {atom} under {set:?}");
                }
            }
        }
    }

    #[test]
    fn litset_consistency_tracks_complement_pairs() {
        let mut s = LitSet::empty(6);
        s.insert(0);
        s.insert(3);
        assert!(s.is_consistent());
        s.insert(1);
        assert!(!s.is_consistent());
        s.remove(1);
        assert!(s.is_consistent());
    }
}
