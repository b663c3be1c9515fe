//! A semantics workbench for formal logic programs.
//!
//! The engine computes the set of literals a program generates (a least
//! fixpoint over a depth-bounded ground base) and derives Kripke-Kleene,
//! answer-set, stable-model, and well-founded semantics from it through
//! contextual-hypothesis program transformations. Textbook constructions
//! of the same semantics live in [`reference`] and are used to
//! cross-validate everything.

pub mod engine;
pub mod extensor;
pub mod fixtures;
pub mod forcing;
mod ground;
pub mod program;
pub mod reference;
pub mod syntax;
pub mod transform;

pub use forcing::{forces, forces_open, Boundary, GroundContext, PartialInterpretation};
pub use program::{FormalLogicProgram, GeneralProgram, LiteralMarker, Rule};
pub use syntax::{Literal, Statement, Term, Vocabulary};
