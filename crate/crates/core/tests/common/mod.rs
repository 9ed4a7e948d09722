#![allow(dead_code)]

use dualmem::structure::random_pair;
use dualmem::{DualStructure, ElementId, MembershipRelation, Permutation};
use proptest::prelude::*;

/// Any acyclic relation on `n` elements: edges go up in a shuffled order.
pub fn arb_dag(max: usize) -> impl Strategy<Value = MembershipRelation> {
    (1..=max).prop_flat_map(|n| {
        (
            proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2),
            any::<u64>(),
        )
            .prop_map(move |(bits, seed)| {
                let p = Permutation::random(n, seed);
                let mut edges = Vec::new();
                let mut k = 0;
                for parent in 0..n {
                    for child in 0..parent {
                        if bits[k] {
                            edges.push((p.apply(child), p.apply(parent)));
                        }
                        k += 1;
                    }
                }
                MembershipRelation::from_edges(n, edges).unwrap()
            })
    })
}

pub fn arb_dag_pair(max: usize) -> impl Strategy<Value = DualStructure> {
    (1..=max)
        .prop_flat_map(|n| (arb_dag_sized(n), arb_dag_sized(n)))
        .prop_map(|(a, b)| DualStructure::new(a, b).unwrap())
}

fn arb_dag_sized(n: usize) -> impl Strategy<Value = MembershipRelation> {
    arb_dag(n).prop_filter("size", move |r| r.domain_size() == n)
}

/// Well-founded extensional pairs.
pub fn arb_pair(max: usize) -> impl Strategy<Value = DualStructure> {
    (1..=max, any::<u64>()).prop_map(|(n, seed)| random_pair(n, seed))
}

/// Every bijection of `0..n`, by Heap's algorithm.
pub fn all_permutations(n: usize) -> Vec<Vec<ElementId>> {
    let mut a: Vec<ElementId> = (0..n).collect();
    let mut c = vec![0; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// `a ∈₁ b ⟺ h(a) ∈₂ h(b)` for every pair, checked on the adjacency directly.
pub fn is_isomorphism(s: &DualStructure, h: &[ElementId]) -> bool {
    let n = s.domain_size();
    (0..n).all(|a| (0..n).all(|b| s.e1().contains(a, b) == s.e2().contains(h[a], h[b])))
}
