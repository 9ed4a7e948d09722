//! Memoized construction of ψ-witnesses.

use std::collections::HashMap;

use super::{check_psi, check_range, transitive_closure, IsoError, PsiWitness};
use crate::structure::{DualStructure, ElementId, Tag};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Unknown,
    Done(Option<ElementId>),
}

/// Computes the matching `m(t)`: the `∈₂`-element whose members are exactly the matches of
/// `t`'s `∈₁`-members. Every ψ-witness for `(x, y)` agrees with `m` on `TC₁({x})`.
pub struct PhiEngine<'s> {
    s: &'s DualStructure,
    realizers: HashMap<&'s [ElementId], Vec<ElementId>>,
    memo: Vec<Slot>,
    memoize: bool,
}

impl<'s> PhiEngine<'s> {
    pub fn new(s: &'s DualStructure) -> Self {
        let mut realizers: HashMap<&'s [ElementId], Vec<ElementId>> = HashMap::new();
        for y in 0..s.domain_size() {
            realizers.entry(s.e2().members(y)).or_default().push(y);
        }
        PhiEngine {
            s,
            realizers,
            memo: vec![Slot::Unknown; s.domain_size()],
            memoize: true,
        }
    }

    /// Same results, recomputed on every call.
    pub fn without_cache(s: &'s DualStructure) -> Self {
        PhiEngine {
            memoize: false,
            ..Self::new(s)
        }
    }

    pub fn structure(&self) -> &'s DualStructure {
        self.s
    }

    fn lookup(&self, members: &[ElementId]) -> Result<Option<ElementId>, IsoError> {
        match self.realizers.get(members).map(Vec::as_slice) {
            None => Ok(None),
            Some([y]) => Ok(Some(*y)),
            Some([a, b, ..]) => Err(IsoError::Ambiguous { a: *a, b: *b }),
            Some([]) => unreachable!("realizer lists are never empty"),
        }
    }

    /// `m(x)`. Errors when `∈₁` has a cycle below `x`.
    pub fn matching(&mut self, x: ElementId) -> Result<Option<ElementId>, IsoError> {
        check_range(self.s, &[x])?;
        if let Slot::Done(v) = self.memo[x] {
            return Ok(v);
        }
        let e1 = self.s.e1();
        if let Some(cycle) = e1.find_cycle_below(x) {
            return Err(IsoError::IllFounded { tag: Tag::E1, cycle });
        }
        let mut local: HashMap<ElementId, Option<ElementId>> = HashMap::new();
        let mut stack = vec![(x, false)];
        while let Some((t, expanded)) = stack.pop() {
            if local.contains_key(&t) {
                continue;
            }
            if let Slot::Done(v) = self.memo[t] {
                local.insert(t, v);
                continue;
            }
            if !expanded {
                stack.push((t, true));
                for &m in e1.members(t) {
                    if !local.contains_key(&m) {
                        stack.push((m, false));
                    }
                }
                continue;
            }
            let images: Option<Vec<ElementId>> = e1.members(t).iter().map(|m| local[m]).collect();
            let v = match images {
                Some(mut img) => {
                    img.sort_unstable();
                    img.dedup();
                    self.lookup(&img)?
                }
                None => None,
            };
            local.insert(t, v);
            if self.memoize {
                self.memo[t] = Slot::Done(v);
            }
        }
        Ok(local[&x])
    }

    /// The unique ψ-witness for `(x, y)`, or `None` when `φ(x, y)` fails.
    pub fn build_psi(&mut self, x: ElementId, y: ElementId) -> Result<Option<PsiWitness>, IsoError> {
        check_range(self.s, &[x, y])?;
        if let Some(cycle) = self.s.e2().find_cycle_below(y) {
            return Err(IsoError::IllFounded { tag: Tag::E2, cycle });
        }
        if self.matching(x)? != Some(y) {
            return Ok(None);
        }
        let mut f = std::collections::BTreeMap::new();
        for t in transitive_closure(self.s.e1(), x, true) {
            f.insert(
                t,
                self.matching(t)?
                    .expect("members of a matched element are matched"),
            );
        }
        // When ∈₁ is not extensional below x, two elements can share a match and (iv) fails.
        if !check_psi(self.s, x, y, &f).all() {
            return Ok(None);
        }
        Ok(Some(PsiWitness { x, y, f }))
    }

    pub fn phi(&mut self, x: ElementId, y: ElementId) -> Result<bool, IsoError> {
        Ok(self.build_psi(x, y)?.is_some())
    }
}

pub fn build_psi(s: &DualStructure, x: ElementId, y: ElementId) -> Result<Option<PsiWitness>, IsoError> {
    PhiEngine::new(s).build_psi(x, y)
}

pub fn phi(s: &DualStructure, x: ElementId, y: ElementId) -> Result<bool, IsoError> {
    PhiEngine::new(s).phi(x, y)
}
