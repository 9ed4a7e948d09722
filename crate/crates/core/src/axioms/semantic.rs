//! Semantic (second-order) forms of the axioms, checked directly on member sets.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CheckMode, SamplingBudget, SubsetWitness, Verdict, Witness};
use crate::structure::{ElementId, MembershipRelation};

type Index<'r> = HashMap<&'r [ElementId], ElementId>;

fn realized(index: &Index<'_>, set: &[ElementId]) -> bool {
    index.contains_key(set)
}

/// Elements of rank below `height − 1`, the arguments for which the relativized axioms
/// demand closure. `None` when the relation has a cycle.
fn low_elements(r: &MembershipRelation) -> Option<Vec<ElementId>> {
    let ranks = r.ranks().ok()?;
    let height = ranks.iter().map(|&k| k + 1).max().unwrap_or(0);
    Some((0..r.domain_size()).filter(|&x| ranks[x] + 1 < height).collect())
}

const NEEDS_FOUNDATION: &str = "foundation-fails";

pub fn check_extensionality(r: &MembershipRelation) -> Verdict {
    Verdict::from_witness(
        r.extensionality_violation()
            .map(|(a, b)| Witness::Duplicate(a, b)),
    )
}

pub fn check_foundation(r: &MembershipRelation) -> Verdict {
    Verdict::from_witness(r.find_cycle().map(Witness::Cycle))
}

/// `{a, b}` exists for all `a, b` of rank below `height − 1`.
pub fn check_pairing(r: &MembershipRelation) -> Verdict {
    let Some(low) = low_elements(r) else {
        return Verdict::skipped(NEEDS_FOUNDATION);
    };
    let index = r.extension_index();
    for (i, &a) in low.iter().enumerate() {
        for &b in &low[i..] {
            let target = if a == b { vec![a] } else { vec![a, b] };
            if !realized(&index, &target) {
                return Verdict::fail(Witness::Missing {
                    at: vec![a, b],
                    target,
                });
            }
        }
    }
    Verdict::pass()
}

/// `⋃a` exists for every `a`.
pub fn check_union(r: &MembershipRelation) -> Verdict {
    let index = r.extension_index();
    for a in 0..r.domain_size() {
        let mut target: Vec<ElementId> = r
            .members(a)
            .iter()
            .flat_map(|&m| r.members(m).iter().copied())
            .collect();
        target.sort_unstable();
        target.dedup();
        if !realized(&index, &target) {
            return Verdict::fail(Witness::Missing { at: vec![a], target });
        }
    }
    Verdict::pass()
}

/// `{x : x ⊆ a}` exists for every `a` of rank below `height − 1`.
pub fn check_power_set(r: &MembershipRelation) -> Verdict {
    let Some(low) = low_elements(r) else {
        return Verdict::skipped(NEEDS_FOUNDATION);
    };
    let n = r.domain_size();
    let index = r.extension_index();
    let mut inside = vec![false; n];
    for a in low {
        for &m in r.members(a) {
            inside[m] = true;
        }
        let target: Vec<ElementId> = (0..n)
            .filter(|&x| r.members(x).iter().all(|&m| inside[m]))
            .collect();
        for &m in r.members(a) {
            inside[m] = false;
        }
        if !realized(&index, &target) {
            return Verdict::fail(Witness::Missing { at: vec![a], target });
        }
    }
    Verdict::pass()
}

fn element_rng(seed: u64, a: ElementId) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (a as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

struct ModeTally {
    samples: usize,
    seed: u64,
}

impl ModeTally {
    fn mode(&self) -> CheckMode {
        if self.samples == 0 {
            CheckMode::Exhaustive
        } else {
            CheckMode::Sampled {
                samples: self.samples,
                seed: self.seed,
            }
        }
    }
}

/// Every subset of every member set is itself a member set.
pub fn check_separation_semantic(r: &MembershipRelation, budget: &SamplingBudget) -> Verdict {
    let index = r.extension_index();
    let mut tally = ModeTally {
        samples: 0,
        seed: budget.seed,
    };
    let mut subset = Vec::new();
    for a in 0..r.domain_size() {
        let ext = r.members(a);
        let check = |subset: &Vec<ElementId>| {
            (!realized(&index, subset)).then(|| {
                Witness::Subset(SubsetWitness {
                    base: a,
                    members: subset.clone(),
                })
            })
        };
        if ext.len() <= budget.separation_bound {
            for mask in 0u64..1 << ext.len() {
                subset.clear();
                subset.extend(
                    ext.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &m)| m),
                );
                if let Some(w) = check(&subset) {
                    return Verdict::fail(w).with_mode(tally.mode());
                }
            }
        } else {
            let mut rng = element_rng(budget.seed, a);
            for _ in 0..budget.samples {
                tally.samples += 1;
                subset.clear();
                subset.extend(ext.iter().copied().filter(|_| rng.gen_bool(0.5)));
                if let Some(w) = check(&subset) {
                    return Verdict::fail(w).with_mode(tally.mode());
                }
            }
        }
    }
    Verdict::pass().with_mode(tally.mode())
}

/// Subsets of `pool` with size in `lo..=hi`, by size and then lexicographically.
fn subsets_by_size(pool: &[ElementId], lo: usize, hi: usize) -> impl Iterator<Item = Vec<ElementId>> + '_ {
    (lo..=hi.min(pool.len())).flat_map(move |k| {
        Combinations::new(pool.len(), k).map(move |idx| idx.iter().map(|&i| pool[i]).collect())
    })
}

struct Combinations {
    idx: Vec<usize>,
    n: usize,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            idx: (0..k).collect(),
            n,
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// A function on `ext` whose image is exactly `image` (which has at most `ext.len()`
/// elements, and is nonempty when `ext` is).
fn function_onto(ext: &[ElementId], image: &[ElementId]) -> Vec<(ElementId, ElementId)> {
    ext.iter()
        .enumerate()
        .map(|(i, &t)| (t, image[i.min(image.len() - 1)]))
        .collect()
}

/// For every `a` and every function `F` from `a`'s member set into the elements of rank
/// below `height − 1`, the image of `F` is a member set.
///
/// The images of functions on an `m`-element set are exactly the subsets of the codomain
/// with between 1 and `m` elements (or `∅` when `m = 0`), so the exhaustive check
/// enumerates those once per `m`.
pub fn check_replacement_semantic(r: &MembershipRelation, budget: &SamplingBudget) -> Verdict {
    let Some(codomain) = low_elements(r) else {
        return Verdict::skipped(NEEDS_FOUNDATION);
    };
    let index = r.extension_index();
    let mut tally = ModeTally {
        samples: 0,
        seed: budget.seed,
    };
    let mut missing_by_size: HashMap<usize, Option<Vec<ElementId>>> = HashMap::new();
    for a in 0..r.domain_size() {
        let ext = r.members(a);
        let m = ext.len();
        if m > 0 && codomain.is_empty() {
            continue;
        }
        if m <= budget.replacement_bound {
            let missing = missing_by_size
                .entry(m)
                .or_insert_with(|| subsets_by_size(&codomain, m.min(1), m).find(|t| !realized(&index, t)));
            if let Some(image) = missing {
                return Verdict::fail(Witness::Image {
                    base: a,
                    map: function_onto(ext, image),
                    image: image.clone(),
                })
                .with_mode(tally.mode());
            }
        } else {
            let mut rng = element_rng(budget.seed, a);
            for _ in 0..budget.samples {
                tally.samples += 1;
                let map: Vec<(ElementId, ElementId)> = ext
                    .iter()
                    .map(|&t| (t, *codomain.choose(&mut rng).unwrap()))
                    .collect();
                let mut image: Vec<ElementId> = map.iter().map(|&(_, v)| v).collect();
                image.sort_unstable();
                image.dedup();
                if !realized(&index, &image) {
                    return Verdict::fail(Witness::Image { base: a, map, image }).with_mode(tally.mode());
                }
            }
        }
    }
    Verdict::pass().with_mode(tally.mode())
}
