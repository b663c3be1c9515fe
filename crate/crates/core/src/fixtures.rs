//! Sample programs used across unit tests, integration tests, benches and
//! documentation.

use std::collections::BTreeSet;

use crate::program::{FormalLogicProgram, LiteralMarker};
use crate::syntax::{Literal, Statement, Term, Vocabulary};
use crate::transform::HypothesisSet;

pub fn num(n: usize) -> Term {
    Term::numeral(n, "0", "s")
}

fn succ(t: Term) -> Term {
    Term::app("s", vec![t])
}

/// Vocabulary with `0`, `s`, unary `p1..p4` and nullary `q1..q5`.
pub fn parity_vocab() -> Vocabulary {
    Vocabulary::with(
        [("0", 0), ("s", 1)],
        [
            ("p1", 1),
            ("p2", 1),
            ("p3", 1),
            ("p4", 1),
            ("q1", 0),
            ("q2", 0),
            ("q3", 0),
            ("q4", 0),
            ("q5", 0),
        ],
    )
    .expect("valid vocabulary")
}

/// A hybrid program that generates the even numerals (and refutes the odd
/// ones) in three different styles with `p1`, `p2`, `p3`, leaves `p4`
/// ungrounded, and carries a small propositional fragment:
/// a fact `q1`, the loop `q2 <-> q3`, `q4 <- q4`, and `q5 <- -q5`.
pub fn parity_program() -> FormalLogicProgram {
    let v1 = Term::var(1);
    let v0 = Term::var(0);
    let atom = |p: &str, t: Term| Statement::Atom(p.into(), vec![t]);
    let neg = |p: &str, t: Term| Statement::NegAtom(p.into(), vec![t]);
    let prop = |p: &str| Statement::Atom(p.into(), vec![]);
    let nprop = |p: &str| Statement::NegAtom(p.into(), vec![]);

    // v1 = 0 ; exists v0 (v1 = s(s(v0)), p(v0))
    let even_pos = |p: &str| {
        Statement::Or(vec![
            Statement::Identity(v1.clone(), num(0)),
            Statement::Exists(
                0,
                Box::new(Statement::And(vec![
                    Statement::Identity(v1.clone(), succ(succ(v0.clone()))),
                    atom(p, v0.clone()),
                ])),
            ),
        ])
    };

    let p1_neg = Statement::And(vec![
        Statement::Distinction(v1.clone(), num(0)),
        Statement::Forall(
            0,
            Box::new(Statement::Or(vec![
                Statement::Distinction(v1.clone(), succ(succ(v0.clone()))),
                neg("p1", v0.clone()),
            ])),
        ),
    ]);
    let p2_neg = Statement::Or(vec![
        Statement::Identity(v1.clone(), num(1)),
        Statement::Exists(
            0,
            Box::new(Statement::And(vec![
                Statement::Identity(v1.clone(), succ(succ(v0.clone()))),
                neg("p2", v0.clone()),
            ])),
        ),
    ]);
    let p3_pos = Statement::Or(vec![
        Statement::Identity(v1.clone(), num(0)),
        Statement::Exists(
            0,
            Box::new(Statement::And(vec![
                Statement::Identity(v1.clone(), succ(v0.clone())),
                neg("p3", v0.clone()),
            ])),
        ),
    ]);
    let p3_neg = Statement::Exists(
        0,
        Box::new(Statement::And(vec![
            Statement::Identity(v1.clone(), succ(v0.clone())),
            atom("p3", v0.clone()),
        ])),
    );

    FormalLogicProgram::new(
        parity_vocab(),
        [
            ("p1".to_string(), (even_pos("p1"), p1_neg)),
            ("p2".to_string(), (even_pos("p2"), p2_neg)),
            ("p3".to_string(), (p3_pos, p3_neg)),
            (
                "p4".to_string(),
                (
                    atom("p4", succ(succ(v1.clone()))),
                    neg("p4", succ(succ(v1.clone()))),
                ),
            ),
            ("q1".to_string(), (Statement::truth(), Statement::falsity())),
            ("q2".to_string(), (prop("q3"), nprop("q3"))),
            ("q3".to_string(), (prop("q2"), nprop("q2"))),
            ("q4".to_string(), (prop("q4"), Statement::falsity())),
            ("q5".to_string(), (nprop("q5"), Statement::falsity())),
        ],
    )
    .expect("valid program")
}

/// The hypothesis set used with [`parity_program`] in the transformation
/// golden tests.
pub fn parity_hypotheses() -> HypothesisSet {
    [
        Literal::atom("p3", vec![num(2)]),
        Literal::atom("p3", vec![num(3)]),
        Literal::neg_atom("p3", vec![num(1)]),
        Literal::neg_atom("p3", vec![num(2)]),
        Literal::atom("p4", vec![num(2)]),
        Literal::neg_atom("p4", vec![num(1)]),
        Literal::neg_prop("q5"),
    ]
    .into_iter()
    .collect()
}

/// A four-atom propositional program with a hand-picked marker whose
/// general form reads:
///
/// ```text
/// p1 <- p2, p3          -p1 <- not -p2; not p4
/// p2 <- p4              -p2 <- -p3
/// p3 <- p3              -p3 <- -p3, not -p2
/// p4 <- not p3
/// ```
pub fn marked_propositional_program() -> (FormalLogicProgram, LiteralMarker) {
    let vocab = Vocabulary::with(
        [] as [(&str, usize); 0],
        [("p1", 0), ("p2", 0), ("p3", 0), ("p4", 0)],
    )
    .expect("valid vocabulary");
    let prop = |p: &str| Statement::Atom(p.into(), vec![]);
    let nprop = |p: &str| Statement::NegAtom(p.into(), vec![]);
    let program = FormalLogicProgram::new(
        vocab,
        [
            (
                "p1".to_string(),
                (
                    Statement::And(vec![prop("p2"), prop("p3")]),
                    Statement::Or(vec![prop("p2"), nprop("p4")]),
                ),
            ),
            ("p2".to_string(), (prop("p4"), nprop("p3"))),
            (
                "p3".to_string(),
                (prop("p3"), Statement::And(vec![nprop("p3"), prop("p2")])),
            ),
            ("p4".to_string(), (nprop("p3"), Statement::falsity())),
        ],
    )
    .expect("valid program");
    let marker = LiteralMarker::new([
        (
            "p1".to_string(),
            (
                BTreeSet::new(),
                BTreeSet::from([vec![0].into(), vec![1].into()]),
            ),
        ),
        (
            "p3".to_string(),
            (BTreeSet::new(), BTreeSet::from([vec![1].into()])),
        ),
        (
            "p4".to_string(),
            (BTreeSet::from([vec![].into()]), BTreeSet::new()),
        ),
    ]);
    marker.validate(&program).expect("valid marker");
    (program, marker)
}

/// `p(X) <- p(s(s(X)))`, symmetrically completed. An infinite descending
/// chain with no base case.
pub fn descending_chain_program() -> FormalLogicProgram {
    let vocab = Vocabulary::with([("0", 0), ("s", 1)], [("p", 1)]).expect("valid vocabulary");
    let body = Statement::Atom(
        "p".into(),
        vec![Term::app("s", vec![Term::app("s", vec![Term::var(1)])])],
    );
    FormalLogicProgram::new(vocab, [("p".to_string(), (body.clone(), body.dual()))])
        .expect("valid program")
}

/// `{p <- -q, q <- -p}`, symmetrically completed: two total models, both
/// atoms undefined under the well-founded reading.
pub fn even_loop_program() -> FormalLogicProgram {
    let vocab =
        Vocabulary::with([] as [(&str, usize); 0], [("p", 0), ("q", 0)]).expect("valid vocabulary");
    let p_pos = Statement::NegAtom("q".into(), vec![]);
    let q_pos = Statement::NegAtom("p".into(), vec![]);
    FormalLogicProgram::new(
        vocab,
        [
            ("p".to_string(), (p_pos.clone(), p_pos.dual())),
            ("q".to_string(), (q_pos.clone(), q_pos.dual())),
        ],
    )
    .expect("valid program")
}

/// `{q <- q}`, symmetrically completed: `q` is false under the
/// well-founded reading and undefined under Kripke-Kleene.
pub fn self_loop_program() -> FormalLogicProgram {
    let vocab = Vocabulary::with([] as [(&str, usize); 0], [("q", 0)]).expect("valid vocabulary");
    let body = Statement::Atom("q".into(), vec![]);
    FormalLogicProgram::new(vocab, [("q".to_string(), (body.clone(), body.dual()))])
        .expect("valid program")
}

/// `{q <- -q}`, symmetrically completed: no stable model.
pub fn odd_loop_program() -> FormalLogicProgram {
    let vocab = Vocabulary::with([] as [(&str, usize); 0], [("q", 0)]).expect("valid vocabulary");
    let body = Statement::NegAtom("q".into(), vec![]);
    FormalLogicProgram::new(vocab, [("q".to_string(), (body.clone(), body.dual()))])
        .expect("valid program")
}
