//! Schema instances for every formula up to a given size.
//!
//! Formulas use the free slots `x0`, `x1`, two bound slots `y0`, `y1`, the atoms
//! `∈₁`, `∈₂`, `=` and the connectives `¬`, `∧`, `∨`, `∃`. Each formula is identified with
//! the set of 4-tuples satisfying it, so enumeration keeps one formula per definable
//! relation. Those that do not depend on the bound slots are candidates: as `φ(w, p)`
//! for separation and as `φ(u, v)` for bounded replacement, under each tag.

use std::collections::HashMap;
use std::fmt;

use super::{SchemaKind, Witness};
use crate::formula::{self, Assignment, Formula};
use crate::structure::{DualStructure, ElementId, Tag};

pub const DEFAULT_DEPTH: usize = 12;

const SLOTS: [&str; 4] = ["x0", "x1", "y0", "y1"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundedConfig {
    /// Largest AST size enumerated.
    pub depth: usize,
    /// Enumeration stops once this many distinct relations are known.
    pub max_classes: usize,
    /// Larger domains are skipped.
    pub max_domain: usize,
}

impl Default for BoundedConfig {
    fn default() -> Self {
        BoundedConfig {
            depth: DEFAULT_DEPTH,
            max_classes: 3000,
            max_domain: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedOutcome {
    Skipped {
        domain: usize,
    },
    Ran {
        depth: usize,
        /// Largest size completed or partially enumerated.
        reached: usize,
        classes: usize,
        candidates: usize,
        truncated: bool,
    },
}

impl fmt::Display for BoundedOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundedOutcome::Skipped { .. } => f.write_str("bounded:skipped"),
            BoundedOutcome::Ran {
                depth,
                reached,
                classes,
                candidates,
                truncated,
            } => {
                write!(
                    f,
                    "bounded:k={depth},size={reached},classes={classes},candidates={candidates}"
                )?;
                if *truncated {
                    f.write_str(",truncated")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedReport {
    pub outcome: BoundedOutcome,
    failures: Vec<(Tag, SchemaKind, Witness)>,
}

impl BoundedReport {
    /// The first failing instance for this tag and schema.
    pub fn failure(&self, tag: Tag, kind: SchemaKind) -> Option<&Witness> {
        self.failures
            .iter()
            .find(|(t, k, _)| *t == tag && *k == kind)
            .map(|(_, _, w)| w)
    }
}

struct Space {
    n: usize,
    words: usize,
}

impl Space {
    fn index(&self, s: [usize; 4]) -> usize {
        ((s[0] * self.n + s[1]) * self.n + s[2]) * self.n + s[3]
    }

    fn tuples(&self) -> impl Iterator<Item = [usize; 4]> {
        let n = self.n;
        (0..n.pow(4)).map(move |i| [i / (n * n * n), i / (n * n) % n, i / n % n, i % n])
    }

    fn get(bits: &[u64], i: usize) -> bool {
        bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn tabulate(&self, f: impl Fn([usize; 4]) -> bool) -> Vec<u64> {
        let mut bits = vec![0u64; self.words];
        for (i, t) in self.tuples().enumerate() {
            if f(t) {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        bits
    }

    fn not(&self, a: &[u64]) -> Vec<u64> {
        let total = self.n.pow(4);
        let mut out: Vec<u64> = a.iter().map(|w| !w).collect();
        if !total.is_multiple_of(64) {
            *out.last_mut().unwrap() &= (1u64 << (total % 64)) - 1;
        }
        out
    }

    fn exists(&self, a: &[u64], slot: usize) -> Vec<u64> {
        self.tabulate(|t| {
            (0..self.n).any(|v| {
                let mut u = t;
                u[slot] = v;
                Self::get(a, self.index(u))
            })
        })
    }

    /// The relation on `(x0, x1)` when `bits` ignores the bound slots.
    fn as_binary(&self, bits: &[u64]) -> Option<Vec<bool>> {
        let n = self.n;
        let mut rel = vec![false; n * n];
        for s0 in 0..n {
            for s1 in 0..n {
                let first = Self::get(bits, self.index([s0, s1, 0, 0]));
                for s2 in 0..n {
                    for s3 in 0..n {
                        if Self::get(bits, self.index([s0, s1, s2, s3])) != first {
                            return None;
                        }
                    }
                }
                rel[s0 * n + s1] = first;
            }
        }
        Some(rel)
    }
}

struct Enumeration {
    classes: Vec<(Vec<u64>, Formula)>,
    reached: usize,
    truncated: bool,
}

fn enumerate(s: &DualStructure, space: &Space, cfg: &BoundedConfig) -> Enumeration {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut classes: Vec<(Vec<u64>, Formula)> = Vec::new();
    let mut levels: Vec<Vec<usize>> = vec![Vec::new()];
    let mut truncated = false;
    let mut add = |bits: Vec<u64>, f: Formula, level: &mut Vec<usize>, classes: &mut Vec<_>| {
        if classes.len() >= cfg.max_classes {
            return false;
        }
        if !seen.contains_key(&bits) {
            seen.insert(bits.clone(), classes.len());
            level.push(classes.len());
            classes.push((bits, f));
        }
        true
    };

    let mut atoms = Vec::new();
    for tag in Tag::BOTH {
        let r = s.relation(tag);
        for a in 0..4 {
            for b in 0..4 {
                let bits = space.tabulate(|t| r.contains(t[a], t[b]));
                add(
                    bits,
                    formula::member(tag, SLOTS[a], SLOTS[b]),
                    &mut atoms,
                    &mut classes,
                );
            }
        }
    }
    for a in 0..4 {
        for b in a + 1..4 {
            let bits = space.tabulate(|t| t[a] == t[b]);
            add(bits, formula::eq(SLOTS[a], SLOTS[b]), &mut atoms, &mut classes);
        }
    }
    levels.push(atoms);

    let mut reached = 1;
    'sizes: for size in 2..=cfg.depth {
        reached = size;
        let mut level = Vec::new();
        for &c in &levels[size - 1] {
            let (bits, f) = classes[c].clone();
            if !add(
                space.not(&bits),
                formula::not(f.clone()),
                &mut level,
                &mut classes,
            ) {
                truncated = true;
                break 'sizes;
            }
            for (slot, var) in SLOTS.iter().enumerate().skip(2) {
                let e = formula::exists(var, f.clone());
                if !add(space.exists(&bits, slot), e, &mut level, &mut classes) {
                    truncated = true;
                    break 'sizes;
                }
            }
        }
        for left in 1..size - 1 {
            let right = size - 1 - left;
            if right < left {
                break;
            }
            for (i, &a) in levels[left].iter().enumerate() {
                let start = if left == right { i } else { 0 };
                for &b in &levels[right][start..] {
                    let (fa, fb) = (&classes[a].1, &classes[b].1);
                    let (ba, bb) = (&classes[a].0, &classes[b].0);
                    let conj: Vec<u64> = ba.iter().zip(bb).map(|(x, y)| x & y).collect();
                    let disj: Vec<u64> = ba.iter().zip(bb).map(|(x, y)| x | y).collect();
                    let (f_and, f_or) = (
                        formula::and(fa.clone(), fb.clone()),
                        formula::or(fa.clone(), fb.clone()),
                    );
                    if !add(conj, f_and, &mut level, &mut classes)
                        || !add(disj, f_or, &mut level, &mut classes)
                    {
                        truncated = true;
                        break 'sizes;
                    }
                }
            }
        }
        levels.push(level);
    }
    Enumeration {
        classes,
        reached,
        truncated,
    }
}

/// Checks separation and bounded replacement for every enumerated formula in two free
/// variables, under both tags.
pub fn check_bounded_schemas(s: &DualStructure, cfg: &BoundedConfig) -> BoundedReport {
    let n = s.domain_size();
    if n > cfg.max_domain || n == 0 {
        return BoundedReport {
            outcome: BoundedOutcome::Skipped { domain: n },
            failures: Vec::new(),
        };
    }
    let space = Space {
        n,
        words: n.pow(4).div_ceil(64),
    };
    let e = enumerate(s, &space, cfg);
    let candidates: Vec<(Vec<bool>, &Formula)> = e
        .classes
        .iter()
        .filter_map(|(bits, f)| space.as_binary(bits).map(|r| (r, f)))
        .collect();
    let mut failures = Vec::new();
    for tag in Tag::BOTH {
        let own = s.relation(tag);
        let index = own.extension_index();
        let has_parent: Vec<bool> = {
            let mut p = vec![false; n];
            for (child, _) in own.edges() {
                p[child] = true;
            }
            p
        };
        let witness = |f: &Formula, asg: Assignment| Witness::Instance {
            name: "bounded".into(),
            formula: Some(f.to_string()),
            assignment: asg,
        };
        // Separation: φ(w, p) with w = x0, p = x1.
        'sep: for (rel, f) in &candidates {
            for p in 0..n {
                for a in 0..n {
                    let subset: Vec<ElementId> = own
                        .members(a)
                        .iter()
                        .copied()
                        .filter(|&w| rel[w * n + p])
                        .collect();
                    if !index.contains_key(subset.as_slice()) {
                        let asg = Assignment::new().with("x1", p).with("a", a);
                        failures.push((tag, SchemaKind::Separation, witness(f, asg)));
                        break 'sep;
                    }
                }
            }
        }
        // Replacement: φ(u, v) with u = x0, v = x1.
        'rep: for (rel, f) in &candidates {
            let value = |u: ElementId| (0..n).find(|&v| rel[u * n + v]);
            let functional = (0..n).all(|u| (0..n).filter(|&v| rel[u * n + v]).count() <= 1);
            if !functional {
                continue;
            }
            for a in 0..n {
                let mut image: Vec<ElementId> = own.members(a).iter().filter_map(|&u| value(u)).collect();
                if !image.iter().all(|&v| has_parent[v]) {
                    continue;
                }
                image.sort_unstable();
                image.dedup();
                if !index.contains_key(image.as_slice()) {
                    failures.push((
                        tag,
                        SchemaKind::Replacement,
                        witness(f, Assignment::new().with("a", a)),
                    ));
                    break 'rep;
                }
            }
        }
    }
    BoundedReport {
        outcome: BoundedOutcome::Ran {
            depth: cfg.depth,
            reached: e.reached,
            classes: e.classes.len(),
            candidates: candidates.len(),
            truncated: e.truncated,
        },
        failures,
    }
}
