//! The fixed joint-vocabulary schema instances used by the isomorphism construction.
//!
//! Each item is a formula of the formula language plus a direct set-level decision
//! procedure for the same sentence. The direct route is what the checker runs; evaluating
//! the instantiated sentence is the independent cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Axiom, CheckMode, SamplingBudget, Verdict, Witness};
use crate::formula::{
    instantiate_bounded_replacement, instantiate_separation, parse_formula, Assignment, Formula,
};
use crate::structure::{DualStructure, ElementId, MembershipRelation, Tag};

/// Parameter tuples (including the source set) beyond which instances are sampled.
const EXHAUSTIVE_TUPLES: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemaKind {
    Separation,
    /// Bounded replacement: the image set is demanded only when every value is a member
    /// of something.
    Replacement,
}

impl SchemaKind {
    pub fn axiom(self) -> Axiom {
        match self {
            SchemaKind::Separation => Axiom::SeparationSchema,
            SchemaKind::Replacement => Axiom::ReplacementSchema,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Native {
    /// `w` is in some member of `g` that meets `u`.
    Theta,
    /// `w ∈_other p`.
    Cross,
    /// `u`'s member set under the other relation is `{v}`.
    Singleton,
}

#[derive(Clone, Debug)]
pub struct BatteryItem {
    pub name: &'static str,
    pub tag: Tag,
    pub kind: SchemaKind,
    pub formula: Formula,
    pub params: Vec<String>,
    native: Native,
}

impl BatteryItem {
    /// The instantiated schema sentence.
    pub fn sentence(&self) -> Formula {
        match self.kind {
            SchemaKind::Separation => instantiate_separation(&self.formula, self.tag, &self.params),
            SchemaKind::Replacement => instantiate_bounded_replacement(&self.formula, self.tag, &self.params),
        }
        .expect("battery formulas are well formed")
    }
}

pub fn battery() -> Vec<BatteryItem> {
    let item = |name, tag, kind, text: &str, params: &[&str], native| BatteryItem {
        name,
        tag,
        kind,
        formula: parse_formula(text).expect("battery formula parses"),
        params: params.iter().map(|p| p.to_string()).collect(),
        native,
    };
    vec![
        item(
            "theta-separation",
            Tag::E2,
            SchemaKind::Separation,
            "exists t (t in1 u & exists p (p in1 g & t in1 p & w in1 p))",
            &["u", "g"],
            Native::Theta,
        ),
        item(
            "cross-separation",
            Tag::E1,
            SchemaKind::Separation,
            "w in2 p",
            &["p"],
            Native::Cross,
        ),
        item(
            "cross-separation",
            Tag::E2,
            SchemaKind::Separation,
            "w in1 p",
            &["p"],
            Native::Cross,
        ),
        item(
            "singleton-replacement",
            Tag::E1,
            SchemaKind::Replacement,
            "v in2 u & forall w (w in2 u -> v = w)",
            &[],
            Native::Singleton,
        ),
        item(
            "singleton-replacement",
            Tag::E2,
            SchemaKind::Replacement,
            "v in1 u & forall w (w in1 u -> v = w)",
            &[],
            Native::Singleton,
        ),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatteryVerdict {
    pub name: &'static str,
    pub tag: Tag,
    pub kind: SchemaKind,
    pub holds: bool,
    /// Values of the parameters and the source set `a` at the first failure.
    pub counterexample: Option<Assignment>,
    pub mode: CheckMode,
}

/// Decides every battery sentence directly on member sets.
pub fn check_schema_battery(s: &DualStructure, budget: &SamplingBudget) -> Vec<BatteryVerdict> {
    battery()
        .into_iter()
        .map(|item| {
            let (counterexample, mode) = decide(s, &item, budget);
            BatteryVerdict {
                name: item.name,
                tag: item.tag,
                kind: item.kind,
                holds: counterexample.is_none(),
                counterexample,
                mode,
            }
        })
        .collect()
}

pub(super) fn aggregate(verdicts: &[BatteryVerdict], tag: Tag, kind: SchemaKind) -> Verdict {
    let relevant: Vec<&BatteryVerdict> = verdicts
        .iter()
        .filter(|v| v.tag == tag && v.kind == kind)
        .collect();
    let mode = relevant
        .iter()
        .find(|v| v.mode != CheckMode::Battery)
        .map_or(CheckMode::Battery, |v| v.mode.clone());
    let failure = relevant.iter().find(|v| !v.holds).map(|v| Witness::Instance {
        name: v.name.to_owned(),
        formula: None,
        assignment: v.counterexample.clone().unwrap_or_default(),
    });
    Verdict::from_witness(failure).with_mode(mode)
}

/// Walks parameter tuples in lexicographic order, or samples them when there are too many.
fn for_each_tuple(
    n: usize,
    arity: usize,
    budget: &SamplingBudget,
    mut f: impl FnMut(&[ElementId]) -> bool,
) -> CheckMode {
    let total = n.checked_pow(arity as u32).unwrap_or(usize::MAX);
    if total <= EXHAUSTIVE_TUPLES {
        if n == 0 && arity > 0 {
            return CheckMode::Battery;
        }
        let mut t = vec![0; arity];
        loop {
            if !f(&t) {
                return CheckMode::Battery;
            }
            let mut i = arity;
            loop {
                if i == 0 {
                    return CheckMode::Battery;
                }
                i -= 1;
                t[i] += 1;
                if t[i] < n {
                    break;
                }
                t[i] = 0;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut t = vec![0; arity];
    let mut samples = 0;
    for _ in 0..budget.samples {
        samples += 1;
        t.iter_mut().for_each(|x| *x = rng.gen_range(0..n));
        if !f(&t) {
            break;
        }
    }
    CheckMode::Sampled {
        samples,
        seed: budget.seed,
    }
}

fn decide(s: &DualStructure, item: &BatteryItem, budget: &SamplingBudget) -> (Option<Assignment>, CheckMode) {
    let n = s.domain_size();
    let own = s.relation(item.tag);
    let other = s.relation(item.tag.other());
    let index = own.extension_index();
    let mut failure = None;
    let mut names: Vec<&str> = item.params.iter().map(String::as_str).collect();
    names.push("a");
    let mode = match item.native {
        Native::Theta | Native::Cross => {
            let mut pred = vec![false; n];
            for_each_tuple(n, names.len(), budget, |t| {
                let (params, a) = t.split_at(t.len() - 1);
                fill_predicate(&mut pred, item.native, other, params);
                let subset: Vec<ElementId> = own.members(a[0]).iter().copied().filter(|&w| pred[w]).collect();
                if index.contains_key(subset.as_slice()) {
                    return true;
                }
                failure = Some(names.iter().zip(t).map(|(k, &v)| (k.to_string(), v)).collect());
                false
            })
        }
        Native::Singleton => {
            let single = |u: ElementId| match other.members(u) {
                [v] => Some(*v),
                _ => None,
            };
            let has_parent: Vec<bool> = {
                let mut p = vec![false; n];
                for (child, _) in own.edges() {
                    p[child] = true;
                }
                p
            };
            for a in 0..n {
                let mut image: Vec<ElementId> = own.members(a).iter().filter_map(|&u| single(u)).collect();
                if !image.iter().all(|&v| has_parent[v]) {
                    continue;
                }
                image.sort_unstable();
                image.dedup();
                if !index.contains_key(image.as_slice()) {
                    failure = Some(Assignment::new().with("a", a));
                    break;
                }
            }
            CheckMode::Battery
        }
    };
    (failure, mode)
}

fn fill_predicate(pred: &mut [bool], native: Native, other: &MembershipRelation, params: &[ElementId]) {
    pred.iter_mut().for_each(|b| *b = false);
    match native {
        Native::Cross => {
            for &w in other.members(params[0]) {
                pred[w] = true;
            }
        }
        Native::Theta => {
            // `other` is ∈₁: the instance separates under ∈₂.
            let (u, g) = (params[0], params[1]);
            let meets_u = |p: ElementId| {
                other
                    .members(p)
                    .iter()
                    .any(|t| other.members(u).binary_search(t).is_ok())
            };
            for &p in other.members(g) {
                if meets_u(p) {
                    for &w in other.members(p) {
                        pred[w] = true;
                    }
                }
            }
        }
        Native::Singleton => unreachable!("replacement items have no separation predicate"),
    }
}
