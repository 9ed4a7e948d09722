//! Counts ψ-witnesses by enumerating every function `TC₁({x}) → TC₂({y})`.
//!
//! Conditions (i) to (v) are restated here over index arrays rather than taken from the
//! iso module, so the count is independent of the witness construction.

use crate::iso::transitive_closure;
use crate::structure::{DualStructure, ElementId};

/// Function spaces larger than this are not enumerated.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessCount {
    Counted(usize),
    TooLarge,
}

pub fn count_psi_witnesses(s: &DualStructure, x: ElementId, y: ElementId, budget: u64) -> WitnessCount {
    let (e1, e2) = (s.e1(), s.e2());
    let dom = transitive_closure(e1, x, true);
    let cod = transitive_closure(e2, y, true);
    let k = dom.len();
    let c = cod.len() as u64;
    let space = match c.checked_pow(k as u32) {
        Some(v) if v <= budget => v,
        _ => return WitnessCount::TooLarge,
    };
    let tc1 = transitive_closure(e1, x, false);
    let tc2 = transitive_closure(e2, y, false);
    let root = dom.binary_search(&x).unwrap();
    let strict: Vec<usize> = tc1.iter().map(|t| dom.binary_search(t).unwrap()).collect();
    let in1: Vec<Vec<bool>> = dom
        .iter()
        .map(|&t| dom.iter().map(|&w| e1.contains(t, w)).collect())
        .collect();

    let mut count = 0;
    let mut f = vec![0usize; k];
    for code in 0..space {
        let mut rest = code;
        for slot in f.iter_mut() {
            *slot = (rest % c) as usize;
            rest /= c;
        }
        let img = |i: usize| cod[f[i]];
        // (i) holds by construction: `f` is total on `dom`.
        if img(root) != y {
            continue;
        }
        let into = strict.iter().all(|&i| tc2.binary_search(&img(i)).is_ok());
        if !into {
            continue;
        }
        let onto = tc2.iter().all(|&v| strict.iter().any(|&i| img(i) == v));
        if !onto {
            continue;
        }
        let membership = strict
            .iter()
            .all(|&i| (0..k).all(|j| in1[i][j] == e2.contains(img(i), img(j))));
        if membership {
            count += 1;
        }
    }
    WitnessCount::Counted(count)
}
