//! Frequently used formulas, with bound names chosen apart from the given free ones.

use std::collections::BTreeSet;

use super::{and, exists, forall, fresh_var, iff, implies, member, not, Formula};
use crate::structure::Tag;

fn avoid(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `∀t (t ∈ x → t ∈ y)`.
pub fn subset(tag: Tag, x: &str, y: &str) -> Formula {
    let t = fresh_var("t", &avoid(&[x, y]));
    forall(&t, implies(member(tag, &t, x), member(tag, &t, y)))
}

/// `∀t ¬ t ∈ x`.
pub fn is_empty(tag: Tag, x: &str) -> Formula {
    let t = fresh_var("t", &avoid(&[x]));
    forall(&t, not(member(tag, &t, x)))
}

/// `∀t (t ∈ x → ∀s (s ∈ t → s ∈ x))`.
pub fn transitive(tag: Tag, x: &str) -> Formula {
    let mut used = avoid(&[x]);
    let t = fresh_var("t", &used);
    used.insert(t.clone());
    let s = fresh_var("s", &used);
    forall(
        &t,
        implies(
            member(tag, &t, x),
            forall(&s, implies(member(tag, &s, &t), member(tag, &s, x))),
        ),
    )
}

/// A transitive set of transitive sets.
pub fn ordinal(tag: Tag, x: &str) -> Formula {
    let t = fresh_var("o", &avoid(&[x]));
    and(
        transitive(tag, x),
        forall(&t, implies(member(tag, &t, x), transitive(tag, &t))),
    )
}

/// `∀x ∀y ((∀z (z ∈ x ↔ z ∈ y)) → x = y)`.
pub fn extensionality(tag: Tag) -> Formula {
    forall(
        "x",
        forall(
            "y",
            implies(
                forall("z", iff(member(tag, "z", "x"), member(tag, "z", "y"))),
                super::eq("x", "y"),
            ),
        ),
    )
}

/// `u` is the least transitive set containing `x` as a subset.
pub fn is_transitive_closure(tag: Tag, x: &str, u: &str) -> Formula {
    let mut used = avoid(&[x, u]);
    let c = fresh_var("c", &used);
    used.insert(c.clone());
    let t = fresh_var("t", &used);
    let contains_x = |set: &str| forall(&t, implies(member(tag, &t, x), member(tag, &t, set)));
    and(
        and(transitive(tag, u), contains_x(u)),
        forall(
            &c,
            implies(and(transitive(tag, &c), contains_x(&c)), subset(tag, u, &c)),
        ),
    )
}

/// `∃y x ∈ y`: `x` is a member of something.
pub fn is_member(tag: Tag, x: &str) -> Formula {
    let y = fresh_var("y", &avoid(&[x]));
    exists(&y, member(tag, x, &y))
}
