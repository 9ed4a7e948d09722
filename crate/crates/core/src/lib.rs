//! Finite dual membership structures `(M, ∈₁, ∈₂)`.
//!
//! The crate checks set-theoretic axioms on each relation (also with formulas that mention
//! the other relation), builds the definable correspondence `φ(x, y) = ∃f ψ(x, y, f)`
//! between the two relations, reads off a global isomorphism when it exists, and checks
//! the lemma chain behind that construction against an independent Mostowski-collapse
//! oracle over hereditarily finite sets.

pub mod axioms;
pub mod formula;
pub mod hf;
pub mod iso;
pub mod lemmas;
pub mod structure;

pub use structure::{DualStructure, ElementId, MembershipRelation, Permutation, Tag};
