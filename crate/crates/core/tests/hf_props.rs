mod common;

use common::arb_dag;
use dualmem::hf::HfUniverse;
use dualmem::MembershipRelation;
use proptest::prelude::*;

/// Longest edge path ending at `x`, by exhaustive search.
fn longest_path_to(r: &MembershipRelation, x: usize) -> u32 {
    r.members(x)
        .iter()
        .map(|&m| longest_path_to(r, m) + 1)
        .max()
        .unwrap_or(0)
}

/// Distinct elements in one reachable part with equal member sets.
fn locally_extensional(r: &MembershipRelation) -> bool {
    let n = r.domain_size();
    (0..n).all(|a| (a + 1..n).all(|b| r.members(a) != r.members(b)))
}

proptest! {
    #[test]
    fn rank_is_longest_path(r in arb_dag(12)) {
        let mut hf = HfUniverse::new();
        let codes = hf.collapse_all(&r).unwrap().codes;
        for (x, &c) in codes.iter().enumerate() {
            prop_assert_eq!(hf.rank(c), longest_path_to(&r, x));
        }
    }

    #[test]
    fn collapse_injective_iff_extensional(r in arb_dag(10)) {
        let mut hf = HfUniverse::new();
        let c = hf.collapse_all(&r).unwrap();
        let mut codes = c.codes.clone();
        codes.sort_unstable();
        codes.dedup();
        let injective = codes.len() == r.domain_size();
        prop_assert_eq!(injective, locally_extensional(&r));
        prop_assert_eq!(c.collision.is_none(), injective);
    }

    #[test]
    fn ackermann_decodes(n in 0u64..1 << 16) {
        let mut hf = HfUniverse::new();
        let h = hf.decode_small(n);
        prop_assert_eq!(hf.small_code(h), Some(n));
        let big = hf.ackermann_code(h).unwrap();
        prop_assert_eq!(hf.decode_ackermann(&big), h);
    }
}
