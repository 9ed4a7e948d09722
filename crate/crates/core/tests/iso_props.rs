mod common;

use common::{all_permutations, arb_dag_pair, arb_pair, is_isomorphism};
use dualmem::hf::HfUniverse;
use dualmem::iso::{
    build_psi, global_isomorphism, is_ordinal, transitive_closure, verify_certificate, IsoCertificate,
    IsoOutcome, PhiEngine,
};
use dualmem::structure::{build_v_universe, scramble};
use dualmem::{DualStructure, ElementId, Permutation};
use proptest::prelude::*;

fn phi_table(s: &DualStructure) -> Vec<(ElementId, ElementId)> {
    let mut e = PhiEngine::new(s);
    let n = s.domain_size();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| e.phi(x, y).unwrap())
        .collect()
}

fn brute_isomorphic(s: &DualStructure) -> bool {
    all_permutations(s.domain_size())
        .iter()
        .any(|h| is_isomorphism(s, h))
}

proptest! {
    #[test]
    fn phi_agrees_with_collapse(s in arb_pair(10)) {
        let mut hf = HfUniverse::new();
        let c1 = hf.collapse_all(s.e1()).unwrap().codes;
        let c2 = hf.collapse_all(s.e2()).unwrap().codes;
        let table = phi_table(&s);
        for (x, a) in c1.iter().enumerate() {
            for (y, b) in c2.iter().enumerate() {
                prop_assert_eq!(table.contains(&(x, y)), a == b);
            }
        }
    }

    #[test]
    fn witnesses_restrict(s in arb_pair(9)) {
        for (x, y) in phi_table(&s) {
            let w = build_psi(&s, x, y).unwrap().unwrap();
            for &x1 in s.e1().members(x) {
                let w1 = build_psi(&s, x1, w.f[&x1]).unwrap().unwrap();
                prop_assert_eq!(w1, w.restrict(&s, x1));
            }
        }
    }

    #[test]
    fn phi_is_partial_injection_preserving_membership_and_ordinals(s in arb_pair(9)) {
        let t = phi_table(&s);
        for &(x, y) in &t {
            prop_assert_eq!(t.iter().filter(|p| p.0 == x).count(), 1);
            prop_assert_eq!(t.iter().filter(|p| p.1 == y).count(), 1);
            prop_assert_eq!(is_ordinal(s.e1(), x), is_ordinal(s.e2(), y));
            for &(x1, y1) in &t {
                prop_assert_eq!(s.e1().contains(x, x1), s.e2().contains(y, y1));
            }
        }
    }

    #[test]
    fn certificates_are_exactly_isomorphisms(s in arb_pair(6), seed in any::<u64>()) {
        let p = Permutation::random(s.domain_size(), seed);
        let c = IsoCertificate { map: p.images().to_vec(), provenance: Vec::new() };
        prop_assert_eq!(verify_certificate(&s, &c), is_isomorphism(&s, p.images()));
        let found = match global_isomorphism(&s).unwrap() {
            IsoOutcome::Certificate(c) => {
                prop_assert!(verify_certificate(&s, &c));
                true
            }
            IsoOutcome::Failure(d) => {
                let braced = d.unmatched.iter().all(|u| u.collapse.starts_with('{'));
                prop_assert!(braced);
                false
            }
        };
        prop_assert_eq!(found, brute_isomorphic(&s));
    }

    #[test]
    fn closure_is_least_and_transitive(s in arb_dag_pair(9), x in 0usize..9) {
        let r = s.e1();
        let x = x % r.domain_size();
        let tc = transitive_closure(r, x, false);
        for &t in &tc {
            prop_assert!(r.members(t).iter().all(|m| tc.contains(m)));
        }
        prop_assert!(r.members(x).iter().all(|m| tc.contains(m)));
        // Least: everything in it is reachable by a member path.
        for &t in &tc {
            let mut frontier = r.members(x).to_vec();
            let mut seen = vec![false; r.domain_size()];
            let mut found = false;
            while let Some(u) = frontier.pop() {
                if u == t { found = true; break; }
                if !seen[u] { seen[u] = true; frontier.extend_from_slice(r.members(u)); }
            }
            prop_assert!(found);
        }
    }

    #[test]
    fn global_results_are_deterministic(s in arb_pair(8)) {
        prop_assert_eq!(global_isomorphism(&s).unwrap().to_string(), global_isomorphism(&s).unwrap().to_string());
    }
}

#[test]
fn scrambled_universes_round_trip() {
    for n in 0..=4 {
        let v = build_v_universe(n).unwrap();
        for seed in 0..20 {
            let p = Permutation::random(v.domain_size(), seed);
            let s = scramble(&v, &p).unwrap();
            let IsoOutcome::Certificate(c) = global_isomorphism(&s).unwrap() else {
                panic!("V_{n} seed {seed}")
            };
            assert_eq!(c.map, p.images());
        }
    }
}

#[test]
fn identical_relations_give_identity() {
    let v = build_v_universe(4).unwrap();
    let IsoOutcome::Certificate(c) = global_isomorphism(&v).unwrap() else {
        panic!()
    };
    assert_eq!(c.map, (0..16).collect::<Vec<_>>());
}
