//! Dual membership structures: one finite domain carrying two membership relations.
//!
//! Elements are dense ids `0..N`. An edge `(child, parent)` reads "child is a member of
//! parent". Ids double as the canonical tie-breaker, so every iteration in this crate runs in
//! ascending id order.

mod format;
mod generate;

pub use format::{parse_structure, serialize_structure, ParseError};
pub use generate::{
    build_v_universe, random_extensional_relation, random_pair, scramble, tamper, TamperKind, MAX_V_LEVEL,
};

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Index of an element of the shared domain.
pub type ElementId = usize;

/// Which of the two membership relations is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    E1,
    E2,
}

impl Tag {
    pub const BOTH: [Tag; 2] = [Tag::E1, Tag::E2];

    pub fn other(self) -> Tag {
        match self {
            Tag::E1 => Tag::E2,
            Tag::E2 => Tag::E1,
        }
    }

    /// `1` or `2`, as used in formula keywords (`in1`, `in2`).
    pub fn index(self) -> u8 {
        match self {
            Tag::E1 => 1,
            Tag::E2 => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Tag> {
        match i {
            1 => Some(Tag::E1),
            2 => Some(Tag::E2),
            _ => None,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::E1 => f.write_str("e1"),
            Tag::E2 => f.write_str("e2"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("element {id} out of range for domain of size {size}")]
    OutOfRange { id: ElementId, size: usize },
    #[error("duplicate edge {child} -> {parent}")]
    DuplicateEdge { child: ElementId, parent: ElementId },
    #[error("relations have different domain sizes ({e1} vs {e2})")]
    SizeMismatch { e1: usize, e2: usize },
    #[error("permutation of length {perm} does not match domain size {size}")]
    PermutationLength { perm: usize, size: usize },
    #[error("not a permutation: {0} occurs twice or is out of range")]
    NotBijective(ElementId),
    #[error("V_{0} is too large to materialize (at most V_{max} is supported)", max = MAX_V_LEVEL)]
    LevelTooLarge(usize),
    #[error("cannot apply {kind} tamper: {reason}")]
    TamperImpossible { kind: TamperKind, reason: &'static str },
}

/// A directed cycle, listed so that each element is a member of the next and the last is a
/// member of the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle(pub Vec<ElementId>);

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&ids.join(" "))
    }
}

/// One membership relation over a domain of `domain_size` elements.
///
/// Stored as a member list per element, each strictly ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MembershipRelation {
    members: Vec<Vec<ElementId>>,
}

impl MembershipRelation {
    pub fn empty(domain_size: usize) -> Self {
        Self {
            members: vec![Vec::new(); domain_size],
        }
    }

    /// Builds a relation from `(child, parent)` pairs, rejecting duplicates.
    pub fn from_edges<I>(domain_size: usize, edges: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (ElementId, ElementId)>,
    {
        let mut rel = Self::empty(domain_size);
        for (child, parent) in edges {
            if !rel.insert(child, parent)? {
                return Err(StructureError::DuplicateEdge { child, parent });
            }
        }
        Ok(rel)
    }

    /// Builds a relation from explicit member lists. Lists are sorted and deduplicated.
    pub fn from_member_lists(lists: Vec<Vec<ElementId>>) -> Result<Self, StructureError> {
        let n = lists.len();
        let mut members = lists;
        for list in &mut members {
            list.sort_unstable();
            list.dedup();
            if let Some(&bad) = list.iter().find(|&&m| m >= n) {
                return Err(StructureError::OutOfRange { id: bad, size: n });
            }
        }
        Ok(Self { members })
    }

    /// Adds an edge; returns `false` if it was already present.
    pub fn insert(&mut self, child: ElementId, parent: ElementId) -> Result<bool, StructureError> {
        let size = self.domain_size();
        for id in [child, parent] {
            if id >= size {
                return Err(StructureError::OutOfRange { id, size });
            }
        }
        let list = &mut self.members[parent];
        match list.binary_search(&child) {
            Ok(_) => Ok(false),
            Err(pos) => {
                list.insert(pos, child);
                Ok(true)
            }
        }
    }

    /// Removes an edge; returns whether it was present.
    pub fn remove(&mut self, child: ElementId, parent: ElementId) -> bool {
        match self.members.get_mut(parent) {
            Some(list) => match list.binary_search(&child) {
                Ok(pos) => {
                    list.remove(pos);
                    true
                }
                Err(_) => false,
            },
            None => false,
        }
    }

    pub fn set_members(&mut self, parent: ElementId, mut members: Vec<ElementId>) {
        members.sort_unstable();
        members.dedup();
        self.members[parent] = members;
    }

    pub fn domain_size(&self) -> usize {
        self.members.len()
    }

    /// Ascending member list of `x`.
    pub fn members(&self, x: ElementId) -> &[ElementId] {
        &self.members[x]
    }

    pub fn contains(&self, child: ElementId, parent: ElementId) -> bool {
        self.members
            .get(parent)
            .is_some_and(|list| list.binary_search(&child).is_ok())
    }

    pub fn edge_count(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// All edges as `(child, parent)`, sorted by `(parent, child)`.
    pub fn edges(&self) -> impl Iterator<Item = (ElementId, ElementId)> + '_ {
        self.members
            .iter()
            .enumerate()
            .flat_map(|(parent, list)| list.iter().map(move |&child| (child, parent)))
    }

    /// For each element, the elements it is a member of (ascending).
    pub fn parents(&self) -> Vec<Vec<ElementId>> {
        let mut parents = vec![Vec::new(); self.domain_size()];
        for (child, parent) in self.edges() {
            parents[child].push(parent);
        }
        parents
    }

    /// Elements ordered so that every member precedes its parents, or a cycle.
    pub fn topological_order(&self) -> Result<Vec<ElementId>, Cycle> {
        let n = self.domain_size();
        let parents = self.parents();
        let mut pending: Vec<usize> = self.members.iter().map(Vec::len).collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<ElementId>> = pending
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(x, _)| std::cmp::Reverse(x))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(x)) = ready.pop() {
            order.push(x);
            for &p in &parents[x] {
                pending[p] -= 1;
                if pending[p] == 0 {
                    ready.push(std::cmp::Reverse(p));
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(self.find_cycle().expect("unsorted elements imply a cycle"))
        }
    }

    /// The first cycle found by a depth-first search started from ascending ids.
    pub fn find_cycle(&self) -> Option<Cycle> {
        (0..self.domain_size()).find_map(|x| self.find_cycle_below(x))
    }

    /// A cycle reachable by walking down member edges from `x`, if any.
    pub fn find_cycle_below(&self, x: ElementId) -> Option<Cycle> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Fresh,
            Open,
            Done,
        }
        let mut mark = vec![Mark::Fresh; self.domain_size()];
        // Each frame is (element, index of next member to visit).
        let mut stack: Vec<(ElementId, usize)> = vec![(x, 0)];
        mark[x] = Mark::Open;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&m) = self.members[node].get(*next) {
                *next += 1;
                match mark[m] {
                    Mark::Fresh => {
                        mark[m] = Mark::Open;
                        stack.push((m, 0));
                    }
                    Mark::Open => {
                        // Stack runs parent -> member; a cycle lists member -> parent.
                        let start = stack.iter().position(|&(e, _)| e == m).unwrap();
                        let mut cycle: Vec<ElementId> = stack[start..].iter().map(|&(e, _)| e).collect();
                        cycle.reverse();
                        return Some(Cycle(cycle));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                stack.pop();
            }
        }
        None
    }

    /// Rank of every element: 0 for elements without members, else one more than the
    /// largest member rank. Fails on cyclic relations.
    pub fn ranks(&self) -> Result<Vec<u32>, Cycle> {
        let order = self.topological_order()?;
        let mut rank = vec![0u32; self.domain_size()];
        for x in order {
            rank[x] = self.members[x].iter().map(|&m| rank[m] + 1).max().unwrap_or(0);
        }
        Ok(rank)
    }

    /// First pair `a < b` (in ascending order of `b`) with identical member lists.
    pub fn extensionality_violation(&self) -> Option<(ElementId, ElementId)> {
        let mut seen: HashMap<&[ElementId], ElementId> = HashMap::new();
        for (x, list) in self.members.iter().enumerate() {
            if let Some(&first) = seen.get(list.as_slice()) {
                return Some((first, x));
            }
            seen.insert(list, x);
        }
        None
    }

    /// Lookup table from member list to the smallest element having it.
    pub fn extension_index(&self) -> HashMap<&[ElementId], ElementId> {
        let mut index = HashMap::with_capacity(self.domain_size());
        for (x, list) in self.members.iter().enumerate() {
            index.entry(list.as_slice()).or_insert(x);
        }
        index
    }

    /// Image of the relation under a permutation of the domain.
    pub fn permuted(&self, p: &Permutation) -> MembershipRelation {
        let mut out = MembershipRelation::empty(self.domain_size());
        for (child, parent) in self.edges() {
            out.members[p.apply(parent)].push(p.apply(child));
        }
        for list in &mut out.members {
            list.sort_unstable();
        }
        out
    }

    /// Induced relation on `keep` (ascending, distinct), renumbered densely.
    pub fn restrict(&self, keep: &[ElementId]) -> MembershipRelation {
        let mut new_id = vec![None; self.domain_size()];
        for (i, &x) in keep.iter().enumerate() {
            new_id[x] = Some(i);
        }
        let members = keep
            .iter()
            .map(|&x| {
                self.members[x]
                    .iter()
                    .filter_map(|&m| new_id[m])
                    .collect::<Vec<_>>()
            })
            .collect();
        MembershipRelation { members }
    }
}

/// The model `(M, ∈₁, ∈₂)`: one domain, two membership relations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualStructure {
    e1: MembershipRelation,
    e2: MembershipRelation,
}

impl DualStructure {
    pub fn new(e1: MembershipRelation, e2: MembershipRelation) -> Result<Self, StructureError> {
        if e1.domain_size() != e2.domain_size() {
            return Err(StructureError::SizeMismatch {
                e1: e1.domain_size(),
                e2: e2.domain_size(),
            });
        }
        Ok(Self { e1, e2 })
    }

    /// Both relations equal to `r`.
    pub fn diagonal(r: MembershipRelation) -> Self {
        Self { e1: r.clone(), e2: r }
    }

    pub fn domain_size(&self) -> usize {
        self.e1.domain_size()
    }

    pub fn relation(&self, tag: Tag) -> &MembershipRelation {
        match tag {
            Tag::E1 => &self.e1,
            Tag::E2 => &self.e2,
        }
    }

    pub fn relation_mut(&mut self, tag: Tag) -> &mut MembershipRelation {
        match tag {
            Tag::E1 => &mut self.e1,
            Tag::E2 => &mut self.e2,
        }
    }

    pub fn e1(&self) -> &MembershipRelation {
        &self.e1
    }

    pub fn e2(&self) -> &MembershipRelation {
        &self.e2
    }

    /// Renames every element by `p` in both relations.
    pub fn permuted(&self, p: &Permutation) -> DualStructure {
        DualStructure {
            e1: self.e1.permuted(p),
            e2: self.e2.permuted(p),
        }
    }

    /// Induced substructure on `keep` (ascending, distinct), renumbered densely.
    pub fn restrict(&self, keep: &[ElementId]) -> DualStructure {
        DualStructure {
            e1: self.e1.restrict(keep),
            e2: self.e2.restrict(keep),
        }
    }
}

/// A bijection of `0..N`, stored as its image sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<ElementId>,
}

impl Permutation {
    pub fn new(images: Vec<ElementId>) -> Result<Self, StructureError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(StructureError::NotBijective(i));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Uniformly shuffled permutation, deterministic in `seed`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut images: Vec<ElementId> = (0..n).collect();
        images.shuffle(&mut rng);
        Self { images }
    }

    /// Exchanges `a` and `b`, fixing everything else.
    pub fn transposition(n: usize, a: ElementId, b: ElementId) -> Result<Self, StructureError> {
        let mut images: Vec<ElementId> = (0..n).collect();
        if a >= n || b >= n {
            return Err(StructureError::OutOfRange {
                id: a.max(b),
                size: n,
            });
        }
        images.swap(a, b);
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: ElementId) -> ElementId {
        self.images[x]
    }

    pub fn images(&self) -> &[ElementId] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Permutation { images: inv }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("perm")?;
        for i in &self.images {
            write!(f, " {i}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> MembershipRelation {
        MembershipRelation::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn duplicate_and_out_of_range_edges_rejected() {
        assert_eq!(
            MembershipRelation::from_edges(2, [(0, 1), (0, 1)]),
            Err(StructureError::DuplicateEdge { child: 0, parent: 1 })
        );
        assert_eq!(
            MembershipRelation::from_edges(2, [(0, 2)]),
            Err(StructureError::OutOfRange { id: 2, size: 2 })
        );
    }

    #[test]
    fn ranks_and_topological_order() {
        let r = chain3();
        assert_eq!(r.ranks().unwrap(), vec![0, 1, 2]);
        assert_eq!(r.topological_order().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn cycle_is_reported_member_to_parent() {
        let r = MembershipRelation::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let Cycle(c) = r.find_cycle().unwrap();
        assert_eq!(c.len(), 3);
        for i in 0..c.len() {
            assert!(r.contains(c[i], c[(i + 1) % c.len()]));
        }
        assert!(r.ranks().is_err());

        let looped = MembershipRelation::from_edges(1, [(0, 0)]).unwrap();
        assert_eq!(looped.find_cycle(), Some(Cycle(vec![0])));
    }

    #[test]
    fn extensionality_violation_finds_first_pair() {
        let r = MembershipRelation::from_edges(4, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(r.extensionality_violation(), Some((1, 2)));
        assert_eq!(chain3().extensionality_violation(), None);
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![1, 0, 2]).is_ok());
        assert_eq!(
            Permutation::new(vec![1, 1, 2]),
            Err(StructureError::NotBijective(1))
        );
        let p = Permutation::random(10, 3);
        assert_eq!(p, Permutation::random(10, 3));
        let inv = p.inverse();
        assert!((0..10).all(|x| inv.apply(p.apply(x)) == x));
    }

    #[test]
    fn restrict_renumbers() {
        let r = chain3().restrict(&[0, 2]);
        assert_eq!(r.domain_size(), 2);
        assert_eq!(r.edge_count(), 0);
        let r = chain3().restrict(&[1, 2]);
        assert_eq!(r.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }
}
