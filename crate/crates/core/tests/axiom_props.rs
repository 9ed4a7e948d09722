mod common;

use common::{arb_dag_pair, arb_pair};
use dualmem::axioms::{full_report, Axiom, FullReport, SamplingBudget, SchemaMode, Witness};
use dualmem::structure::{build_v_universe, tamper, TamperKind};
use dualmem::{DualStructure, MembershipRelation, Permutation, Tag};
use proptest::prelude::*;

fn pattern(r: &FullReport) -> Vec<(Tag, Axiom, bool, bool)> {
    Tag::BOTH
        .iter()
        .flat_map(|&t| {
            r.relation(t)
                .verdicts()
                .map(move |(a, v)| (t, a, v.is_pass(), v.is_fail()))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn realized(r: &MembershipRelation, set: &[usize]) -> bool {
    (0..r.domain_size()).any(|x| r.members(x) == set)
}

/// Re-derives the violated condition from the witness alone.
fn witness_holds(r: &MembershipRelation, axiom: Axiom, w: &Witness) -> bool {
    match (axiom, w) {
        (Axiom::Extensionality, Witness::Duplicate(a, b)) => a != b && r.members(*a) == r.members(*b),
        (Axiom::Foundation, Witness::Cycle(c)) => {
            let k = c.0.len();
            k > 0 && (0..k).all(|i| r.contains(c.0[i], c.0[(i + 1) % k]))
        }
        (Axiom::Pairing, Witness::Missing { at, target }) => {
            let mut pair = at.clone();
            pair.sort_unstable();
            pair.dedup();
            &pair == target && !realized(r, target)
        }
        (Axiom::Union, Witness::Missing { at, target }) => {
            let mut u: Vec<usize> = r
                .members(at[0])
                .iter()
                .flat_map(|&m| r.members(m).to_vec())
                .collect();
            u.sort_unstable();
            u.dedup();
            &u == target && !realized(r, target)
        }
        (Axiom::PowerSet, Witness::Missing { at, target }) => {
            let base = r.members(at[0]);
            let subsets: Vec<usize> = (0..r.domain_size())
                .filter(|&x| r.members(x).iter().all(|m| base.contains(m)))
                .collect();
            &subsets == target && !realized(r, target)
        }
        (Axiom::SeparationSemantic, Witness::Subset(s)) => {
            s.members.iter().all(|m| r.members(s.base).contains(m)) && !realized(r, &s.members)
        }
        (Axiom::ReplacementSemantic, Witness::Image { base, map, image }) => {
            let keys: Vec<usize> = map.iter().map(|&(a, _)| a).collect();
            let mut img: Vec<usize> = map.iter().map(|&(_, b)| b).collect();
            img.sort_unstable();
            img.dedup();
            keys == r.members(*base) && &img == image && !realized(r, image)
        }
        (Axiom::SeparationSchema | Axiom::ReplacementSchema, Witness::Instance { .. }) => true,
        _ => false,
    }
}

proptest! {
    #[test]
    fn verdicts_are_permutation_invariant(s in arb_pair(7), seed in any::<u64>()) {
        let b = SamplingBudget::default();
        let p = Permutation::random(s.domain_size(), seed);
        let a = full_report(&s, &b, SchemaMode::Battery);
        let c = full_report(&s.permuted(&p), &b, SchemaMode::Battery);
        prop_assert_eq!(pattern(&a), pattern(&c));
    }

    #[test]
    fn fail_witnesses_reverify(s in arb_dag_pair(7)) {
        let r = full_report(&s, &SamplingBudget::default(), SchemaMode::Skip);
        for tag in Tag::BOTH {
            for (axiom, v) in r.relation(tag).verdicts() {
                if let Some(w) = v.witness() {
                    prop_assert!(witness_holds(s.relation(tag), axiom, w), "{tag} {axiom} {w:?}");
                }
            }
        }
    }

    #[test]
    fn report_text_round_trips(s in arb_dag_pair(6)) {
        let r = full_report(&s, &SamplingBudget::default(), SchemaMode::Battery);
        let back: FullReport = r.to_string().parse().unwrap();
        prop_assert_eq!(back.to_string(), r.to_string());
    }
}

#[test]
fn tampering_v3_breaks_the_targeted_axiom() {
    let v3 = build_v_universe(3).unwrap();
    let check = |s: &DualStructure| full_report(s, &SamplingBudget::default(), SchemaMode::Battery);
    assert!(check(&v3).all_pass());
    for seed in 0..10 {
        let t = tamper(&v3, TamperKind::AddCycle, seed).unwrap();
        let fails: Vec<Axiom> = check(&t).relation(Tag::E1).failures().collect();
        assert!(fails.contains(&Axiom::Foundation));
        assert!(check(&t).relation(Tag::E2).failures().next().is_none());

        let t = tamper(&v3, TamperKind::BreakExtensionality, seed).unwrap();
        assert!(check(&t).relation(Tag::E1).get(Axiom::Extensionality).is_fail());

        let t = tamper(&v3, TamperKind::RemoveEdge, seed).unwrap();
        assert!(check(&t).relation(Tag::E1).get(Axiom::Foundation).is_pass());
    }
}
