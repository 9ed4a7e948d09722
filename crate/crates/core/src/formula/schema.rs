//! Instances of the separation and replacement schemas.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{and, exists, forall, forall_all, fresh_var, iff, implies, member, Formula};
use crate::structure::Tag;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("variable `{var}` would be captured: it is reserved for the {role}")]
    VariableCapture { var: String, role: &'static str },
    #[error("variable `{0}` is free in the formula but is not a parameter")]
    UnexpectedFreeVariable(String),
    #[error("`{0}` is not a valid variable name")]
    BadName(String),
}

fn check_params(params: &[String], reserved: &[(&str, &'static str)]) -> Result<(), SchemaError> {
    for p in params {
        if !super::is_identifier(p) {
            return Err(SchemaError::BadName(p.clone()));
        }
        if let Some((_, role)) = reserved.iter().find(|(r, _)| r == p) {
            return Err(SchemaError::VariableCapture { var: p.clone(), role });
        }
    }
    Ok(())
}

fn check_free(
    f: &Formula,
    allowed: &[&str],
    params: &[String],
    captured: &[(&str, &'static str)],
) -> Result<(), SchemaError> {
    for v in f.free_vars() {
        if let Some((_, role)) = captured.iter().find(|(c, _)| *c == v) {
            return Err(SchemaError::VariableCapture { var: v, role });
        }
        if !allowed.contains(&v.as_str()) && !params.contains(&v) {
            return Err(SchemaError::UnexpectedFreeVariable(v));
        }
    }
    Ok(())
}

/// `∀params ∀a ∃b ∀w (w ∈ b ↔ w ∈ a ∧ f)` with membership `∈_tag`.
///
/// `f` may mention `w` and the parameters freely; `a` and `b` must not be free in it.
pub fn instantiate_separation(f: &Formula, tag: Tag, params: &[String]) -> Result<Formula, SchemaError> {
    const SET: (&str, &str) = ("a", "source set");
    const OUT: (&str, &str) = ("b", "separated set");
    check_params(params, &[("w", "separated variable"), SET, OUT])?;
    check_free(f, &["w"], params, &[SET, OUT])?;
    let body = forall(
        "a",
        exists(
            "b",
            forall(
                "w",
                iff(member(tag, "w", "b"), and(member(tag, "w", "a"), f.clone())),
            ),
        ),
    );
    Ok(forall_all(params, body))
}

const REPLACEMENT_RESERVED: [(&str, &str); 4] = [
    ("u", "domain variable"),
    ("v", "image variable"),
    ("a", "source set"),
    ("b", "image set"),
];

struct Replacement {
    functional: Formula,
    fresh: BTreeSet<String>,
}

fn replacement_parts(f: &Formula, params: &[String]) -> Result<Replacement, SchemaError> {
    check_params(params, &REPLACEMENT_RESERVED)?;
    check_free(f, &["u", "v"], params, &REPLACEMENT_RESERVED[2..])?;
    let mut avoid = f.all_vars();
    avoid.extend(params.iter().cloned());
    avoid.extend(REPLACEMENT_RESERVED.iter().map(|(v, _)| v.to_string()));
    let v2 = fresh_var("v_", &avoid);
    avoid.insert(v2.clone());
    let functional = forall(
        "u",
        forall(
            "v",
            forall(
                &v2,
                implies(and(f.clone(), f.rename_free("v", &v2)), super::eq("v", &v2)),
            ),
        ),
    );
    Ok(Replacement {
        functional,
        fresh: avoid,
    })
}

fn image_set(f: &Formula, tag: Tag) -> Formula {
    exists(
        "b",
        forall(
            "v",
            iff(
                member(tag, "v", "b"),
                exists("u", and(member(tag, "u", "a"), f.clone())),
            ),
        ),
    )
}

/// `∀params ((∀u ∀v ∀v' (f ∧ f[v'/v] → v = v')) → ∀a ∃b ∀v (v ∈ b ↔ ∃u (u ∈ a ∧ f)))`.
///
/// `v'` is a name not occurring in `f`.
pub fn instantiate_replacement(f: &Formula, tag: Tag, params: &[String]) -> Result<Formula, SchemaError> {
    let parts = replacement_parts(f, params)?;
    let body = implies(parts.functional, forall("a", image_set(f, tag)));
    Ok(forall_all(params, body))
}

/// Replacement restricted to sources whose images all lie in the domain of `∈_tag`:
///
/// `∀params (Fun → ∀a ((∀u (u ∈ a → ∀v (f → ∃z v ∈ z))) → ∃b ∀v (v ∈ b ↔ ∃u (u ∈ a ∧ f))))`.
///
/// In a finite `V_n` the unrestricted schema fails for any `f` whose values reach the top
/// rank; the guard excludes exactly those sources.
pub fn instantiate_bounded_replacement(
    f: &Formula,
    tag: Tag,
    params: &[String],
) -> Result<Formula, SchemaError> {
    let parts = replacement_parts(f, params)?;
    let z = fresh_var("z", &parts.fresh);
    let guard = forall(
        "u",
        implies(
            member(tag, "u", "a"),
            forall("v", implies(f.clone(), exists(&z, member(tag, "v", &z)))),
        ),
    );
    let body = implies(parts.functional, forall("a", implies(guard, image_set(f, tag))));
    Ok(forall_all(params, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{evaluate, parse_formula, Assignment};
    use crate::structure::build_v_universe;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn params(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn separation_shape() {
        let s = instantiate_separation(&p("w in2 p"), Tag::E1, &params(&["p"])).unwrap();
        assert_eq!(
            s,
            p("forall p forall a exists b forall w (w in1 b <-> w in1 a & w in2 p)")
        );
        assert!(s.is_sentence());
    }

    #[test]
    fn separation_rejects_capture() {
        assert_eq!(
            instantiate_separation(&p("w in1 a"), Tag::E1, &[]),
            Err(SchemaError::VariableCapture {
                var: "a".into(),
                role: "source set"
            })
        );
        assert_eq!(
            instantiate_separation(&p("w in1 q"), Tag::E1, &[]),
            Err(SchemaError::UnexpectedFreeVariable("q".into()))
        );
        assert!(matches!(
            instantiate_separation(&p("w in1 w"), Tag::E1, &params(&["b"])),
            Err(SchemaError::VariableCapture { .. })
        ));
        // Bound occurrences of reserved names are harmless.
        assert!(instantiate_separation(&p("exists a w in1 a"), Tag::E1, &[]).is_ok());
    }

    #[test]
    fn replacement_fresh_name_avoids_formula() {
        let f = p("v in1 u & exists v_ v_ = v");
        let r = instantiate_replacement(&f, Tag::E1, &[]).unwrap();
        assert!(r.all_vars().contains("v_1"));
        assert!(r.is_sentence());
    }

    #[test]
    fn replacement_rejects_capture() {
        assert!(matches!(
            instantiate_replacement(&p("v in1 b"), Tag::E1, &[]),
            Err(SchemaError::VariableCapture { .. })
        ));
        assert!(matches!(
            instantiate_replacement(&p("v in1 u"), Tag::E1, &params(&["u"])),
            Err(SchemaError::VariableCapture { .. })
        ));
    }

    #[test]
    fn v3_satisfies_identity_instances() {
        let s = build_v_universe(3).unwrap();
        let sep = instantiate_separation(&p("w = w"), Tag::E1, &[]).unwrap();
        assert!(evaluate(&s, &sep, &Assignment::new()).unwrap());
        let rep = instantiate_bounded_replacement(&p("v = u"), Tag::E2, &[]).unwrap();
        assert!(evaluate(&s, &rep, &Assignment::new()).unwrap());
    }

    #[test]
    fn plain_replacement_fails_at_the_top_of_v3() {
        // u ↦ {u} sends {∅, {∅}} outside V_3.
        let s = build_v_universe(3).unwrap();
        let f = p("forall t (t in1 v <-> t = u)");
        let plain = instantiate_replacement(&f, Tag::E1, &[]).unwrap();
        assert!(!evaluate(&s, &plain, &Assignment::new()).unwrap());
        let bounded = instantiate_bounded_replacement(&f, Tag::E1, &[]).unwrap();
        assert!(evaluate(&s, &bounded, &Assignment::new()).unwrap());
    }
}
