mod common;

use common::arb_dag_pair;
use dualmem::formula::{evaluate, forall_all, Assignment, Formula};
use dualmem::{Permutation, Tag};
use proptest::prelude::*;

fn arb_formula() -> impl Strategy<Value = Formula> {
    let var = prop::sample::select(vec!["x", "y", "z"]);
    let tag = prop::sample::select(vec![Tag::E1, Tag::E2]);
    let leaf = prop_oneof![
        Just(Formula::True),
        (tag, var.clone(), var.clone()).prop_map(|(t, a, b)| Formula::Member(t, a.into(), b.into())),
        (var.clone(), var.clone()).prop_map(|(a, b)| Formula::Eq(a.into(), b.into())),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Iff(Box::new(a), Box::new(b))),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Formula::ForAll(v.into(), Box::new(b))),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Formula::Exists(v.into(), Box::new(b))),
        ]
    })
}

/// Renames every bound variable to a fresh `q<k>`.
fn alpha_rename(f: &Formula, next: &mut usize) -> Formula {
    let bin = |a: &Formula, b: &Formula, next: &mut usize| {
        (Box::new(alpha_rename(a, next)), Box::new(alpha_rename(b, next)))
    };
    match f {
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let fresh = format!("q{next}");
            *next += 1;
            let body = Box::new(alpha_rename(&body.rename_free(v, &fresh), next));
            match f {
                Formula::ForAll(..) => Formula::ForAll(fresh, body),
                _ => Formula::Exists(fresh, body),
            }
        }
        Formula::Not(a) => Formula::Not(Box::new(alpha_rename(a, next))),
        Formula::And(a, b) => {
            let (a, b) = bin(a, b, next);
            Formula::And(a, b)
        }
        Formula::Or(a, b) => {
            let (a, b) = bin(a, b, next);
            Formula::Or(a, b)
        }
        Formula::Implies(a, b) => {
            let (a, b) = bin(a, b, next);
            Formula::Implies(a, b)
        }
        Formula::Iff(a, b) => {
            let (a, b) = bin(a, b, next);
            Formula::Iff(a, b)
        }
        other => other.clone(),
    }
}

fn full_assignment(f: &Formula, n: usize, seed: usize) -> Assignment {
    let mut a = Assignment::new();
    for (i, v) in f.free_vars().iter().enumerate() {
        a.insert(v, (seed + i) % n);
    }
    a
}

fn close(f: &Formula) -> Formula {
    let free: Vec<String> = f.free_vars().into_iter().collect();
    forall_all(&free, f.clone())
}

proptest! {
    #[test]
    fn bound_renaming_is_invisible(s in arb_dag_pair(5), f in arb_formula(), seed in 0usize..5) {
        let renamed = alpha_rename(&f, &mut 0);
        prop_assert_eq!(renamed.free_vars(), f.free_vars());
        let asg = full_assignment(&f, s.domain_size(), seed);
        prop_assert_eq!(evaluate(&s, &f, &asg).unwrap(), evaluate(&s, &renamed, &asg).unwrap());
    }

    #[test]
    fn sentences_ignore_the_assignment(s in arb_dag_pair(5), f in arb_formula(), seed in 0usize..5) {
        let sentence = close(&f);
        let n = s.domain_size();
        let noise = Assignment::new().with("x", seed % n).with("y", (seed + 1) % n).with("z", 0);
        prop_assert_eq!(
            evaluate(&s, &sentence, &Assignment::new()).unwrap(),
            evaluate(&s, &sentence, &noise).unwrap()
        );
    }

    #[test]
    fn sentences_are_isomorphism_invariant(s in arb_dag_pair(6), f in arb_formula(), pseed in any::<u64>()) {
        let sentence = close(&f);
        let p = Permutation::random(s.domain_size(), pseed);
        prop_assert_eq!(
            evaluate(&s, &sentence, &Assignment::new()).unwrap(),
            evaluate(&s.permuted(&p), &sentence, &Assignment::new()).unwrap()
        );
    }
}
