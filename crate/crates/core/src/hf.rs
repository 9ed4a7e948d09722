//! Hereditarily finite sets and the Mostowski collapse.
//!
//! This module is the independent oracle for the correspondence built in [`crate::iso`]:
//! two elements correspond exactly when their collapses are the same hereditarily finite
//! set. Sets are interned in an [`HfUniverse`], so equality of [`HfCode`]s is equality of
//! ids. Ackermann numbers are only materialized on request; `V_5` already contains sets
//! whose code is around `2^65535`.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::structure::{Cycle, ElementId, MembershipRelation, MAX_V_LEVEL};

/// Rank of a hereditarily finite set: 0 for `∅`, else one more than the largest member rank.
pub type Rank = u32;

/// Codes whose members have Ackermann numbers at or above this bit count are refused by
/// [`HfUniverse::ackermann_code`].
pub const MAX_CODE_BITS: u64 = 1 << 24;

/// Interned hereditarily finite set. Only meaningful together with the [`HfUniverse`] that
/// produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HfCode(u32);

impl HfCode {
    pub fn id(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HfError {
    #[error("V_{0} is too large to enumerate (at most V_{max})", max = MAX_V_LEVEL)]
    LevelTooLarge(usize),
    #[error("Ackermann code too large to materialize")]
    CodeTooLarge,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("cycle below element {element}: {cycle}")]
    Cycle { element: ElementId, cycle: Cycle },
}

#[derive(Debug)]
struct Node {
    members: Box<[HfCode]>,
    rank: Rank,
    /// Ackermann code when it fits in 64 bits.
    small: Option<u64>,
}

/// Result of collapsing one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collapsed {
    pub code: HfCode,
    /// Two distinct elements below (or equal to) the start element that collapse to the same
    /// set, which means the relation is not extensional there.
    pub collision: Option<(ElementId, ElementId)>,
}

/// Result of collapsing every element of a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapsedRelation {
    pub codes: Vec<HfCode>,
    pub collision: Option<(ElementId, ElementId)>,
}

/// Intern table for hereditarily finite sets.
#[derive(Debug)]
pub struct HfUniverse {
    nodes: Vec<Node>,
    index: HashMap<Box<[HfCode]>, HfCode>,
}

impl Default for HfUniverse {
    fn default() -> Self {
        Self::new()
    }
}

impl HfUniverse {
    pub fn new() -> Self {
        let mut u = HfUniverse {
            nodes: Vec::new(),
            index: HashMap::new(),
        };
        u.intern(Vec::new());
        u
    }

    pub fn empty_set(&self) -> HfCode {
        HfCode(0)
    }

    /// The set with the given members; order and repetition are irrelevant.
    pub fn intern(&mut self, mut members: Vec<HfCode>) -> HfCode {
        members.sort_unstable();
        members.dedup();
        let members = members.into_boxed_slice();
        if let Some(&h) = self.index.get(&members) {
            return h;
        }
        let rank = members
            .iter()
            .map(|m| self.nodes[m.0 as usize].rank + 1)
            .max()
            .unwrap_or(0);
        let small = members.iter().try_fold(0u64, |acc, m| {
            let c = self.nodes[m.0 as usize].small?;
            (c < 64).then(|| acc | 1u64 << c)
        });
        let h = HfCode(u32::try_from(self.nodes.len()).expect("intern table overflow"));
        self.nodes.push(Node {
            members: members.clone(),
            rank,
            small,
        });
        self.index.insert(members, h);
        h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Members sorted by intern id.
    pub fn members(&self, h: HfCode) -> &[HfCode] {
        &self.nodes[h.0 as usize].members
    }

    pub fn rank(&self, h: HfCode) -> Rank {
        self.nodes[h.0 as usize].rank
    }

    /// Ackermann code if it is below `2^64`.
    pub fn small_code(&self, h: HfCode) -> Option<u64> {
        self.nodes[h.0 as usize].small
    }

    /// `code(∅) = 0`, `code(x) = Σ_{m ∈ x} 2^code(m)`.
    pub fn ackermann_code(&self, h: HfCode) -> Result<BigUint, HfError> {
        if let Some(c) = self.small_code(h) {
            return Ok(BigUint::from(c));
        }
        let mut total = BigUint::ZERO;
        for &m in self.members(h) {
            let exp = self.ackermann_code(m)?;
            let exp = u64::try_from(&exp).map_err(|_| HfError::CodeTooLarge)?;
            if exp >= MAX_CODE_BITS {
                return Err(HfError::CodeTooLarge);
            }
            total.set_bit(exp, true);
        }
        Ok(total)
    }

    /// Inverse of [`Self::ackermann_code`]: the members are the positions of the set bits.
    pub fn decode_ackermann(&mut self, n: &BigUint) -> HfCode {
        if n.bits() == 0 {
            return self.empty_set();
        }
        let members = (0..n.bits())
            .filter(|&i| n.bit(i))
            .map(|i| self.decode_ackermann(&BigUint::from(i)))
            .collect();
        self.intern(members)
    }

    pub fn decode_small(&mut self, n: u64) -> HfCode {
        self.decode_ackermann(&BigUint::from(n))
    }

    /// Compares by Ackermann code without building the numbers.
    pub fn cmp_ackermann(&self, a: HfCode, b: HfCode) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        if let (Some(x), Some(y)) = (self.small_code(a), self.small_code(b)) {
            return x.cmp(&y);
        }
        // Highest differing "bit" decides, i.e. the largest member not shared.
        let xs = self.sorted_members_desc(a);
        let ys = self.sorted_members_desc(b);
        for (x, y) in xs.iter().zip(&ys) {
            if x != y {
                return self.cmp_ackermann(*x, *y);
            }
        }
        xs.len().cmp(&ys.len())
    }

    fn sorted_members_desc(&self, h: HfCode) -> Vec<HfCode> {
        let mut ms = self.members(h).to_vec();
        ms.sort_by(|x, y| self.cmp_ackermann(*y, *x));
        ms
    }

    /// Members in ascending Ackermann order.
    pub fn members_ackermann_order(&self, h: HfCode) -> Vec<HfCode> {
        let mut ms = self.members(h).to_vec();
        ms.sort_by(|x, y| self.cmp_ackermann(*x, *y));
        ms
    }

    /// Nested braces with members in Ackermann order, e.g. `{{},{{}}}`.
    pub fn render(&self, h: HfCode) -> String {
        let mut out = String::new();
        self.render_into(h, &mut out);
        out
    }

    fn render_into(&self, h: HfCode, out: &mut String) {
        out.push('{');
        for (i, m) in self.members_ackermann_order(h).into_iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.render_into(m, out);
        }
        out.push('}');
    }

    /// All sets of rank below `n`, in ascending Ackermann order.
    pub fn v_level_codes(&mut self, n: usize) -> Result<Vec<HfCode>, HfError> {
        if n > MAX_V_LEVEL {
            return Err(HfError::LevelTooLarge(n));
        }
        let mut level: Vec<HfCode> = Vec::new();
        for _ in 0..n {
            // Subset masks over an Ackermann-sorted level enumerate the next level in
            // Ackermann order.
            let k = level.len();
            let next = (0u64..1 << k)
                .map(|mask| {
                    let members = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| level[i]).collect();
                    self.intern(members)
                })
                .collect();
            level = next;
        }
        Ok(level)
    }

    /// Mostowski collapse of `x`: the set of the collapses of its members.
    pub fn collapse(&mut self, r: &MembershipRelation, x: ElementId) -> Result<Collapsed, CollapseError> {
        let mut codes: Vec<Option<HfCode>> = vec![None; r.domain_size()];
        let mut open = vec![false; r.domain_size()];
        let mut reached = Vec::new();
        let mut stack: Vec<(ElementId, usize)> = vec![(x, 0)];
        open[x] = true;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let members = r.members(node);
            if let Some(&m) = members.get(*next) {
                *next += 1;
                if codes[m].is_some() {
                    continue;
                }
                if open[m] {
                    let cycle = r.find_cycle_below(x).expect("open member implies a cycle");
                    return Err(CollapseError::Cycle { element: x, cycle });
                }
                open[m] = true;
                stack.push((m, 0));
            } else {
                let set = members.iter().map(|&m| codes[m].unwrap()).collect();
                codes[node] = Some(self.intern(set));
                open[node] = false;
                reached.push(node);
                stack.pop();
            }
        }
        reached.sort_unstable();
        let collision = first_collision(reached.iter().map(|&e| (e, codes[e].unwrap())));
        Ok(Collapsed {
            code: codes[x].unwrap(),
            collision,
        })
    }

    /// Collapses every element; fails on the first cycle.
    pub fn collapse_all(&mut self, r: &MembershipRelation) -> Result<CollapsedRelation, CollapseError> {
        let order = r.topological_order().map_err(|cycle| CollapseError::Cycle {
            element: cycle.0[0],
            cycle,
        })?;
        let mut codes = vec![self.empty_set(); r.domain_size()];
        for x in order {
            let set = r.members(x).iter().map(|&m| codes[m]).collect();
            codes[x] = self.intern(set);
        }
        let collision = first_collision(codes.iter().copied().enumerate());
        Ok(CollapsedRelation { codes, collision })
    }
}

fn first_collision(items: impl Iterator<Item = (ElementId, HfCode)>) -> Option<(ElementId, ElementId)> {
    let mut seen: HashMap<HfCode, ElementId> = HashMap::new();
    for (e, c) in items {
        if let Some(&first) = seen.get(&c) {
            return Some((first, e));
        }
        seen.insert(c, e);
    }
    None
}
