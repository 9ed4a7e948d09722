mod common;

use common::{arb_dag_pair, arb_pair};
use dualmem::axioms::{check_extensionality, check_foundation};
use dualmem::hf::HfUniverse;
use dualmem::structure::{
    build_v_universe, parse_structure, random_extensional_relation, scramble, serialize_structure, tamper,
    TamperKind,
};
use dualmem::Permutation;
use proptest::prelude::*;

fn degrees(r: &dualmem::MembershipRelation) -> Vec<(usize, usize)> {
    let parents = r.parents();
    let mut d: Vec<(usize, usize)> = (0..r.domain_size())
        .map(|x| (r.members(x).len(), parents[x].len()))
        .collect();
    d.sort_unstable();
    d
}

proptest! {
    #[test]
    fn serialize_round_trips(s in arb_dag_pair(9)) {
        prop_assert_eq!(parse_structure(&serialize_structure(&s)).unwrap(), s);
    }

    #[test]
    fn serialize_round_trips_tampered(s in arb_pair(8), seed in any::<u64>(), k in 0usize..3) {
        if let Ok(t) = tamper(&s, TamperKind::ALL[k], seed) {
            prop_assert_eq!(parse_structure(&serialize_structure(&t)).unwrap(), t);
        }
    }

    #[test]
    fn scramble_keeps_edge_count_and_degrees(s in arb_dag_pair(9), seed in any::<u64>()) {
        let p = Permutation::random(s.domain_size(), seed);
        let t = scramble(&s, &p).unwrap();
        prop_assert_eq!(t.e2().edge_count(), s.e1().edge_count());
        prop_assert_eq!(degrees(t.e2()), degrees(s.e1()));
        prop_assert_eq!(t.e1(), s.e1());
    }

    #[test]
    fn random_relations_pass_extensionality_and_foundation(n in 1usize..40, seed in any::<u64>()) {
        let r = random_extensional_relation(n, seed);
        prop_assert!(check_extensionality(&r).is_pass());
        prop_assert!(check_foundation(&r).is_pass());
    }
}

#[test]
fn v_universe_sizes_match_the_oracle() {
    let mut hf = HfUniverse::new();
    for (n, expected) in [0usize, 1, 2, 4, 16, 65536].into_iter().enumerate() {
        let v = build_v_universe(n).unwrap();
        assert_eq!(v.domain_size(), expected);
        assert_eq!(hf.v_level_codes(n).unwrap().len(), expected);
        let codes = hf.collapse_all(v.e1()).unwrap().codes;
        let small: Vec<u64> = codes.iter().map(|&c| hf.small_code(c).unwrap()).collect();
        assert_eq!(small, (0..expected as u64).collect::<Vec<_>>());
    }
}
