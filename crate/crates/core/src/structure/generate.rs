//! Generators for positive and negative instances.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DualStructure, ElementId, MembershipRelation, Permutation, StructureError};

/// Largest `n` for which `V_n` is materialized (`|V_5| = 65536`).
pub const MAX_V_LEVEL: usize = 5;

const REJECTION_ATTEMPTS: usize = 32;
const RESAMPLE_ATTEMPTS: usize = 8;

/// `(V_n, ∈, ∈)`, element `i` being the set with Ackermann code `i`: `a ∈ b` iff bit `a` of
/// `b` is set.
pub fn build_v_universe(n: usize) -> Result<DualStructure, StructureError> {
    if n > MAX_V_LEVEL {
        return Err(StructureError::LevelTooLarge(n));
    }
    let mut size = 0usize;
    for _ in 0..n {
        size = 1usize << size;
    }
    let lists = (0..size)
        .map(|code| {
            (0..usize::BITS as usize)
                .filter(|&bit| code >> bit & 1 == 1)
                .collect()
        })
        .collect();
    let rel = MembershipRelation::from_member_lists(lists)?;
    Ok(DualStructure::diagonal(rel))
}

/// Keeps `E1` and replaces `E2` by the image of `E1` under `p`, so `p` is an isomorphism
/// `(M, E1) → (M, E2')`.
pub fn scramble(s: &DualStructure, p: &Permutation) -> Result<DualStructure, StructureError> {
    if p.len() != s.domain_size() {
        return Err(StructureError::PermutationLength {
            perm: p.len(),
            size: s.domain_size(),
        });
    }
    DualStructure::new(s.e1().clone(), s.e1().permuted(p))
}

/// An acyclic extensional relation on `size` elements, deterministic in `seed`.
///
/// Whole relations are drawn and rejected a bounded number of times; after that a
/// layered construction with per-element de-duplication is used, which always succeeds.
pub fn random_extensional_relation(size: usize, seed: u64) -> MembershipRelation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REJECTION_ATTEMPTS {
        let rel = draw_layered(size, &mut rng, false);
        if rel.extensionality_violation().is_none() {
            return rel;
        }
    }
    draw_layered(size, &mut rng, true)
}

/// Elements are placed in a random order; each takes a random subset of the elements placed
/// before it. With `dedup`, a subset already taken is redrawn and finally replaced by the
/// first unused one among: the empty set, singletons, pairs.
fn draw_layered(size: usize, rng: &mut ChaCha8Rng, dedup: bool) -> MembershipRelation {
    let mut order: Vec<ElementId> = (0..size).collect();
    order.shuffle(rng);
    let mut lists = vec![Vec::new(); size];
    let mut used: HashSet<Vec<ElementId>> = HashSet::new();
    for k in 0..size {
        let earlier = &order[..k];
        let mut pick = random_subset(earlier, rng);
        if dedup {
            let mut tries = 0;
            while used.contains(&pick) && tries < RESAMPLE_ATTEMPTS {
                pick = random_subset(earlier, rng);
                tries += 1;
            }
            if used.contains(&pick) {
                pick = small_subsets(earlier)
                    .find(|s| !used.contains(s))
                    .expect("k+1 used sets cannot cover the empty set, k singletons and the pairs");
            }
        }
        used.insert(pick.clone());
        lists[order[k]] = pick;
    }
    MembershipRelation::from_member_lists(lists).expect("members are in range")
}

fn random_subset(from: &[ElementId], rng: &mut ChaCha8Rng) -> Vec<ElementId> {
    let mut s: Vec<ElementId> = from.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    s.sort_unstable();
    s
}

fn small_subsets(from: &[ElementId]) -> impl Iterator<Item = Vec<ElementId>> {
    let mut sorted = from.to_vec();
    sorted.sort_unstable();
    let k = sorted.len();
    let singles = (0..k).map(|i| vec![i]);
    let pairs = (0..k).flat_map(move |i| (i + 1..k).map(move |j| vec![i, j]));
    std::iter::once(Vec::new())
        .chain(singles)
        .chain(pairs)
        .map(move |idx| idx.iter().map(|&i| sorted[i]).collect())
}

/// Two independently drawn extensional relations on one domain.
pub fn random_pair(size: usize, seed: u64) -> DualStructure {
    let e1 = random_extensional_relation(size, seed.wrapping_mul(2));
    let e2 = random_extensional_relation(size, seed.wrapping_mul(2).wrapping_add(1));
    DualStructure::new(e1, e2).expect("same size")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TamperKind {
    AddCycle,
    BreakExtensionality,
    RemoveEdge,
}

impl TamperKind {
    pub const ALL: [TamperKind; 3] = [
        TamperKind::AddCycle,
        TamperKind::BreakExtensionality,
        TamperKind::RemoveEdge,
    ];
}

impl fmt::Display for TamperKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TamperKind::AddCycle => "add-cycle",
            TamperKind::BreakExtensionality => "break-extensionality",
            TamperKind::RemoveEdge => "remove-edge",
        })
    }
}

impl FromStr for TamperKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TamperKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown tamper kind `{s}`"))
    }
}

/// A mutated copy of `s`; only `E1` is touched.
///
/// * `add-cycle` adds the reverse of an existing edge, or a self-loop when there is none.
/// * `break-extensionality` gives some `b` the member set of some `a ≠ b`, choosing `b` not
///   below `a` so no cycle appears.
/// * `remove-edge` deletes one edge.
pub fn tamper(s: &DualStructure, kind: TamperKind, seed: u64) -> Result<DualStructure, StructureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = s.clone();
    let n = s.domain_size();
    let edges: Vec<(ElementId, ElementId)> = s.e1().edges().collect();
    let e1 = out.relation_mut(super::Tag::E1);
    match kind {
        TamperKind::AddCycle => {
            if let Some(&(a, b)) = edges.choose(&mut rng) {
                e1.insert(b, a)?;
            } else if n > 0 {
                let x = rng.gen_range(0..n);
                e1.insert(x, x)?;
            } else {
                return Err(StructureError::TamperImpossible {
                    kind,
                    reason: "empty domain",
                });
            }
        }
        TamperKind::BreakExtensionality => {
            if n < 2 {
                return Err(StructureError::TamperImpossible {
                    kind,
                    reason: "fewer than two elements",
                });
            }
            let parents = s.e1().parents();
            let mut order: Vec<ElementId> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut done = false;
            for b in order {
                let above = ancestors(&parents, b);
                let candidates: Vec<ElementId> = (0..n).filter(|&a| a != b && !above[a]).collect();
                if let Some(&a) = candidates.choose(&mut rng) {
                    let copied = s.e1().members(a).to_vec();
                    e1.set_members(b, copied);
                    done = true;
                    break;
                }
            }
            if !done {
                return Err(StructureError::TamperImpossible {
                    kind,
                    reason: "no pair can be merged without a cycle",
                });
            }
        }
        TamperKind::RemoveEdge => {
            let Some(&(child, parent)) = edges.choose(&mut rng) else {
                return Err(StructureError::TamperImpossible {
                    kind,
                    reason: "no edge to remove",
                });
            };
            e1.remove(child, parent);
        }
    }
    Ok(out)
}

/// Marks every element that has `x` in its transitive closure.
fn ancestors(parents: &[Vec<ElementId>], x: ElementId) -> Vec<bool> {
    let mut seen = vec![false; parents.len()];
    let mut stack = parents[x].clone();
    while let Some(p) = stack.pop() {
        if !seen[p] {
            seen[p] = true;
            stack.extend_from_slice(&parents[p]);
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Tag;

    fn iterated_power_set_size(n: usize) -> usize {
        // |V_{k+1}| = 2^{|V_k|}
        (0..n).fold(0, |acc, _| 1 << acc)
    }

    #[test]
    fn v_universe_sizes_and_edges() {
        assert_eq!(build_v_universe(0).unwrap().domain_size(), 0);
        let v3 = build_v_universe(3).unwrap();
        assert_eq!(v3.domain_size(), 4);
        let edges: Vec<_> = v3.e1().edges().collect();
        let mut expected = vec![(0, 1), (0, 3), (1, 2), (1, 3)];
        expected.sort_by_key(|&(c, p)| (p, c));
        assert_eq!(edges, expected);
        assert_eq!(v3.e1(), v3.e2());
        for n in 0..=4 {
            assert_eq!(
                build_v_universe(n).unwrap().domain_size(),
                iterated_power_set_size(n)
            );
        }
        assert_eq!(build_v_universe(6), Err(StructureError::LevelTooLarge(6)));
    }

    #[test]
    fn scramble_by_transposition() {
        let v3 = build_v_universe(3).unwrap();
        let id = scramble(&v3, &Permutation::identity(4)).unwrap();
        assert_eq!(id.e1(), id.e2());

        let p = Permutation::transposition(4, 1, 2).unwrap();
        let s = scramble(&v3, &p).unwrap();
        let expected = MembershipRelation::from_edges(4, [(0, 2), (0, 3), (2, 1), (2, 3)]).unwrap();
        assert_eq!(s.e2(), &expected);
        assert_eq!(s.e1(), v3.e1());

        assert!(matches!(
            scramble(&v3, &Permutation::identity(3)),
            Err(StructureError::PermutationLength { .. })
        ));
    }

    #[test]
    fn random_relation_small_cases() {
        for seed in 0..20 {
            assert_eq!(random_extensional_relation(1, seed).edge_count(), 0);
            let r = random_extensional_relation(2, seed);
            let edges: Vec<_> = r.edges().collect();
            assert!(edges == vec![(0, 1)] || edges == vec![(1, 0)], "{edges:?}");
        }
        assert_eq!(
            random_extensional_relation(8, 42),
            random_extensional_relation(8, 42)
        );
    }

    #[test]
    fn random_relations_are_extensional_and_acyclic() {
        for size in 1..=24 {
            for seed in 0..10 {
                let r = random_extensional_relation(size, seed);
                assert!(r.extensionality_violation().is_none(), "size {size} seed {seed}");
                assert!(r.find_cycle().is_none());
            }
        }
    }

    #[test]
    fn fallback_construction_is_extensional() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for size in 1..40 {
            let r = draw_layered(size, &mut rng, true);
            assert!(r.extensionality_violation().is_none());
            assert!(r.find_cycle().is_none());
        }
    }

    #[test]
    fn tamper_add_cycle_on_v2() {
        let v2 = build_v_universe(2).unwrap();
        let t = tamper(&v2, TamperKind::AddCycle, 0).unwrap();
        let edges: Vec<_> = t.e1().edges().collect();
        assert_eq!(edges, vec![(1, 0), (0, 1)]);
        assert_eq!(t.e2(), v2.e2());
    }

    #[test]
    fn tamper_kinds_do_what_they_say() {
        let v3 = build_v_universe(3).unwrap();
        for seed in 0..20 {
            let t = tamper(&v3, TamperKind::AddCycle, seed).unwrap();
            assert!(t.e1().find_cycle().is_some());

            let t = tamper(&v3, TamperKind::BreakExtensionality, seed).unwrap();
            assert!(t.e1().extensionality_violation().is_some());
            assert!(t.e1().find_cycle().is_none());

            let t = tamper(&v3, TamperKind::RemoveEdge, seed).unwrap();
            assert_eq!(t.e1().edge_count(), v3.e1().edge_count() - 1);
            assert!(t.e1().find_cycle().is_none());
        }
        let one = build_v_universe(1).unwrap();
        assert!(tamper(&one, TamperKind::BreakExtensionality, 0).is_err());
        assert!(tamper(&one, TamperKind::RemoveEdge, 0).is_err());
        let looped = tamper(&one, TamperKind::AddCycle, 0).unwrap();
        assert!(looped.relation(Tag::E1).contains(0, 0));
    }

    #[test]
    fn tamper_kind_round_trips_through_text() {
        for k in TamperKind::ALL {
            assert_eq!(k.to_string().parse::<TamperKind>().unwrap(), k);
        }
        assert!("bogus".parse::<TamperKind>().is_err());
    }
}
