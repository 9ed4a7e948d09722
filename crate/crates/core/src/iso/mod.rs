//! The definable correspondence `φ(x, y) = ∃f ψ(x, y, f)` between the two relations.
//!
//! `ψ(x, y, f)` says: `f` is a function with domain `TC₁({x})` (i), mapping `TC₁(x)` into
//! `TC₂(y)` (ii) and onto it (iii), preserving membership between `TC₁(x)` and `TC₁({x})`
//! (iv), with `f(x) = y` (v). Witnesses are built by well-founded recursion: each `t` is
//! sent to the unique `∈₂`-element whose members are the images of `t`'s members. The
//! conditions are then re-checked by [`check_psi`], which does not use that recursion.

mod engine;
mod global;
mod levels;

pub use engine::{build_psi, phi, PhiEngine};
pub use global::{
    find_violation, global_isomorphism, verify_certificate, CaseTag, FailureDiagnostic, IsoCertificate,
    IsoOutcome, Pass, Provenance, Unmatched, Violation,
};
pub use levels::{extend_to_level, internal_level, InternalLevel};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::structure::{Cycle, DualStructure, ElementId, MembershipRelation, Tag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoError {
    #[error("element {element} is outside a domain of size {size}")]
    OutOfRange { element: ElementId, size: usize },
    #[error("{tag} is ill-founded: cycle {cycle}")]
    IllFounded { tag: Tag, cycle: Cycle },
    #[error("{tag} is not extensional: {a} and {b} have the same members")]
    NonExtensional { tag: Tag, a: ElementId, b: ElementId },
    #[error("e2 elements {a} and {b} both realize a matched member set")]
    Ambiguous { a: ElementId, b: ElementId },
    #[error("{element} is not an ordinal under {tag}")]
    NotOrdinal { tag: Tag, element: ElementId },
    #[error("no {tag} element realizes the level of ordinal {ordinal}")]
    MissingLevel {
        tag: Tag,
        ordinal: ElementId,
        extension: Vec<ElementId>,
    },
    #[error("image of {u} is not realized inside the target level: {image:?}")]
    UnrealizedImage { u: ElementId, image: Vec<ElementId> },
    #[error("extension sends {t} to {found}, the given witness to {expected}")]
    Disagreement {
        t: ElementId,
        expected: ElementId,
        found: ElementId,
    },
    #[error("constructed map for ({x}, {y}) violates {conditions}")]
    NotAWitness {
        x: ElementId,
        y: ElementId,
        conditions: PsiConditions,
    },
}

/// A witness `f` for `ψ(x, y, f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiWitness {
    pub x: ElementId,
    pub y: ElementId,
    pub f: BTreeMap<ElementId, ElementId>,
}

impl PsiWitness {
    pub fn get(&self, t: ElementId) -> Option<ElementId> {
        self.f.get(&t).copied()
    }

    /// `f` restricted to `TC₁({x'})` for some `x'` in its domain.
    pub fn restrict(&self, s: &DualStructure, x: ElementId) -> PsiWitness {
        let keep = transitive_closure(s.e1(), x, true);
        PsiWitness {
            x,
            y: self.f[&x],
            f: keep.iter().map(|&t| (t, self.f[&t])).collect(),
        }
    }
}

/// Truth of conditions (i)–(v) separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PsiConditions {
    pub domain: bool,
    pub into: bool,
    pub onto: bool,
    pub membership: bool,
    pub root: bool,
}

impl PsiConditions {
    pub fn all(&self) -> bool {
        self.domain && self.into && self.onto && self.membership && self.root
    }
}

impl fmt::Display for PsiConditions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<&str> = [
            (self.domain, "(i)"),
            (self.into, "(ii)"),
            (self.onto, "(iii)"),
            (self.membership, "(iv)"),
            (self.root, "(v)"),
        ]
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| *name)
        .collect();
        if failed.is_empty() {
            f.write_str("nothing")
        } else {
            f.write_str(&failed.join(","))
        }
    }
}

/// `TC(x)`, or `TC({x})` with `include_self`, ascending. Works on cyclic relations too.
pub fn transitive_closure(r: &MembershipRelation, x: ElementId, include_self: bool) -> Vec<ElementId> {
    let mut seen = vec![false; r.domain_size()];
    let mut stack: Vec<ElementId> = r.members(x).to_vec();
    let mut out = Vec::new();
    if include_self {
        seen[x] = true;
        out.push(x);
    }
    while let Some(t) = stack.pop() {
        if seen[t] {
            continue;
        }
        seen[t] = true;
        out.push(t);
        stack.extend(r.members(t).iter().copied().filter(|&m| !seen[m]));
    }
    out.sort_unstable();
    out
}

pub fn is_transitive(r: &MembershipRelation, x: ElementId) -> bool {
    r.members(x)
        .iter()
        .all(|&t| r.members(t).iter().all(|&w| r.contains(w, x)))
}

/// A transitive set of transitive sets.
pub fn is_ordinal(r: &MembershipRelation, x: ElementId) -> bool {
    is_transitive(r, x) && r.members(x).iter().all(|&t| is_transitive(r, t))
}

/// Evaluates (i)–(v) for `f` directly from their definitions.
pub fn check_psi(
    s: &DualStructure,
    x: ElementId,
    y: ElementId,
    f: &BTreeMap<ElementId, ElementId>,
) -> PsiConditions {
    let (e1, e2) = (s.e1(), s.e2());
    let tc1 = transitive_closure(e1, x, false);
    let tc1_self = transitive_closure(e1, x, true);
    let tc2 = transitive_closure(e2, y, false);
    let domain = f.keys().copied().eq(tc1_self.iter().copied());
    let image = |t: &ElementId| f.get(t).copied();
    let into = tc1
        .iter()
        .all(|t| image(t).is_some_and(|v| tc2.binary_search(&v).is_ok()));
    let onto = tc2.iter().all(|&t| tc1.iter().any(|w| image(w) == Some(t)));
    let membership = tc1.iter().all(|t| {
        tc1_self.iter().all(|w| match (image(t), image(w)) {
            (Some(ft), Some(fw)) => e1.contains(*t, *w) == e2.contains(ft, fw),
            _ => false,
        })
    });
    let root = image(&x) == Some(y);
    PsiConditions {
        domain,
        into,
        onto,
        membership,
        root,
    }
}

fn check_range(s: &DualStructure, xs: &[ElementId]) -> Result<(), IsoError> {
    let size = s.domain_size();
    match xs.iter().find(|&&x| x >= size) {
        Some(&element) => Err(IsoError::OutOfRange { element, size }),
        None => Ok(()),
    }
}
