//! Internal cumulative levels and the level-by-level extension of a witness.

use std::collections::{BTreeMap, HashMap};

use super::{check_psi, check_range, is_ordinal, transitive_closure, IsoError, PsiWitness};
use crate::structure::{DualStructure, ElementId, MembershipRelation, Tag};

/// The `α`-th level under one relation: `L(α) = {x : x ⊆ L(β) for some β ∈ α}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalLevel {
    pub tag: Tag,
    pub ordinal: ElementId,
    pub extension: Vec<ElementId>,
    /// The least element whose member set is `extension`.
    pub element: Option<ElementId>,
}

fn level_mask(
    r: &MembershipRelation,
    alpha: ElementId,
    memo: &mut HashMap<ElementId, Vec<bool>>,
) -> Vec<bool> {
    if let Some(m) = memo.get(&alpha) {
        return m.clone();
    }
    let n = r.domain_size();
    let mut out = vec![false; n];
    for &beta in r.members(alpha) {
        let below = level_mask(r, beta, memo);
        for (x, slot) in out.iter_mut().enumerate() {
            if !*slot && r.members(x).iter().all(|&m| below[m]) {
                *slot = true;
            }
        }
    }
    memo.insert(alpha, out.clone());
    out
}

pub fn internal_level(s: &DualStructure, tag: Tag, alpha: ElementId) -> Result<InternalLevel, IsoError> {
    check_range(s, &[alpha])?;
    let r = s.relation(tag);
    if let Some(cycle) = r.find_cycle_below(alpha) {
        return Err(IsoError::IllFounded { tag, cycle });
    }
    if !is_ordinal(r, alpha) {
        return Err(IsoError::NotOrdinal { tag, element: alpha });
    }
    let mask = level_mask(r, alpha, &mut HashMap::new());
    let extension: Vec<ElementId> = (0..r.domain_size()).filter(|&x| mask[x]).collect();
    let element = (0..r.domain_size()).find(|&x| r.members(x) == extension.as_slice());
    Ok(InternalLevel {
        tag,
        ordinal: alpha,
        extension,
        element,
    })
}

fn level_element(s: &DualStructure, tag: Tag, alpha: ElementId) -> Result<ElementId, IsoError> {
    let level = internal_level(s, tag, alpha)?;
    level.element.ok_or(IsoError::MissingLevel {
        tag,
        ordinal: alpha,
        extension: level.extension,
    })
}

/// Given the witness for ordinals `(α, y)`, the witness `f̄` for their levels
/// `(V¹_α, V²_y)`: each `u ∈ TC₁({V¹_α})`, in order of rank, goes to the element of
/// `TC₂({V²_y})` whose members are the images of `u`'s members.
///
/// `α` itself is not in `V¹_α`, so `f̄ ⊇ f` is checked on the common domain.
pub fn extend_to_level(s: &DualStructure, w: &PsiWitness) -> Result<PsiWitness, IsoError> {
    let (e1, e2) = (s.e1(), s.e2());
    let (alpha, y) = (w.x, w.y);
    if !is_ordinal(e1, alpha) {
        return Err(IsoError::NotOrdinal {
            tag: Tag::E1,
            element: alpha,
        });
    }
    if !is_ordinal(e2, y) {
        return Err(IsoError::NotOrdinal {
            tag: Tag::E2,
            element: y,
        });
    }
    let l1 = level_element(s, Tag::E1, alpha)?;
    let l2 = level_element(s, Tag::E2, y)?;

    let mut target: HashMap<&[ElementId], ElementId> = HashMap::new();
    for v in transitive_closure(e2, l2, true).into_iter().rev() {
        target.insert(e2.members(v), v);
    }
    let domain = transitive_closure(e1, l1, true);
    let order = rank_order(e1, &domain);

    let mut fbar: BTreeMap<ElementId, ElementId> = BTreeMap::new();
    for u in order {
        let mut image: Vec<ElementId> = e1.members(u).iter().map(|t| fbar[t]).collect();
        image.sort_unstable();
        image.dedup();
        match target.get(image.as_slice()) {
            Some(&v) => {
                fbar.insert(u, v);
            }
            None => return Err(IsoError::UnrealizedImage { u, image }),
        }
    }
    for (&t, &expected) in &w.f {
        if let Some(&found) = fbar.get(&t) {
            if found != expected {
                return Err(IsoError::Disagreement { t, expected, found });
            }
        }
    }
    let conditions = check_psi(s, l1, l2, &fbar);
    if !conditions.all() {
        return Err(IsoError::NotAWitness {
            x: l1,
            y: l2,
            conditions,
        });
    }
    Ok(PsiWitness {
        x: l1,
        y: l2,
        f: fbar,
    })
}

/// `set` (closed under members, acyclic) sorted by rank, ties by id.
fn rank_order(r: &MembershipRelation, set: &[ElementId]) -> Vec<ElementId> {
    let mut rank: HashMap<ElementId, u32> = HashMap::new();
    for &x in set {
        let mut stack = vec![(x, false)];
        while let Some((t, expanded)) = stack.pop() {
            if rank.contains_key(&t) {
                continue;
            }
            if expanded {
                let k = r.members(t).iter().map(|m| rank[m] + 1).max().unwrap_or(0);
                rank.insert(t, k);
            } else {
                stack.push((t, true));
                stack.extend(r.members(t).iter().map(|&m| (m, false)));
            }
        }
    }
    let mut out = set.to_vec();
    out.sort_by_key(|&x| (rank[&x], x));
    out
}
