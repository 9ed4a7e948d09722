//! Which axioms of the finite surrogate theory hold for each relation of a dual structure.
//!
//! A finite structure cannot be closed under pairing or power set, so those axioms (and
//! semantic replacement) are checked relative to the height `h` of the relation: they are
//! required only for arguments of rank below `h − 1`, and replacement functions must take
//! values of rank below `h − 1`. With that reading every `(V_n, ∈)` passes, and extensionality,
//! foundation, relativized power set and semantic separation together characterize the `V_n`.
//! Union and separation need no relativization.

mod battery;
mod bounded;
mod report;
mod semantic;

pub use battery::{battery, check_schema_battery, BatteryItem, BatteryVerdict, SchemaKind};
pub use bounded::{check_bounded_schemas, BoundedConfig, BoundedOutcome, BoundedReport, DEFAULT_DEPTH};
pub use report::{AxiomReport, FullReport, ReportParseError};
pub use semantic::{
    check_extensionality, check_foundation, check_pairing, check_power_set, check_replacement_semantic,
    check_separation_semantic, check_union,
};

use std::fmt;

use crate::formula::Assignment;
use crate::structure::{Cycle, DualStructure, ElementId, Tag};

/// Axioms in report order (alphabetical by name).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Extensionality,
    Foundation,
    Pairing,
    PowerSet,
    ReplacementSchema,
    ReplacementSemantic,
    SeparationSchema,
    SeparationSemantic,
    Union,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::Extensionality,
        Axiom::Foundation,
        Axiom::Pairing,
        Axiom::PowerSet,
        Axiom::ReplacementSchema,
        Axiom::ReplacementSemantic,
        Axiom::SeparationSchema,
        Axiom::SeparationSemantic,
        Axiom::Union,
    ];

    /// The semantic axioms whose joint truth characterizes `(V_n, ∈)`.
    pub const CHARACTERIZING: [Axiom; 6] = [
        Axiom::Extensionality,
        Axiom::Foundation,
        Axiom::Pairing,
        Axiom::PowerSet,
        Axiom::SeparationSemantic,
        Axiom::Union,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Extensionality => "extensionality",
            Axiom::Foundation => "foundation",
            Axiom::Pairing => "pairing",
            Axiom::PowerSet => "power-set",
            Axiom::ReplacementSchema => "replacement-schema",
            Axiom::ReplacementSemantic => "replacement-semantic",
            Axiom::SeparationSchema => "separation-schema",
            Axiom::SeparationSemantic => "separation-semantic",
            Axiom::Union => "union",
        }
    }

    pub fn from_name(s: &str) -> Option<Axiom> {
        Axiom::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A subset of `base`'s member set with no element realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetWitness {
    pub base: ElementId,
    pub members: Vec<ElementId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Distinct elements with equal member sets.
    Duplicate(ElementId, ElementId),
    Cycle(Cycle),
    /// No element has member set `target`; `at` are the axiom's arguments.
    Missing {
        at: Vec<ElementId>,
        target: Vec<ElementId>,
    },
    Subset(SubsetWitness),
    /// The image of `map` (a function on `base`'s member set) is not realized.
    Image {
        base: ElementId,
        map: Vec<(ElementId, ElementId)>,
        image: Vec<ElementId>,
    },
    /// A schema instance is false; `assignment` falsifies its outer universal block.
    Instance {
        name: String,
        formula: Option<String>,
        assignment: Assignment,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
    Battery,
    Bounded(BoundedOutcome),
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckMode::Exhaustive => f.write_str("exhaustive"),
            CheckMode::Sampled { samples, seed } => write!(f, "sampled:{samples},seed={seed}"),
            CheckMode::Battery => f.write_str("battery"),
            CheckMode::Bounded(b) => write!(f, "battery+{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Witness),
    /// Reason is a single kebab-case word.
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub mode: Option<CheckMode>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            outcome: Outcome::Pass,
            mode: None,
        }
    }

    pub fn fail(w: Witness) -> Self {
        Verdict {
            outcome: Outcome::Fail(w),
            mode: None,
        }
    }

    pub fn skipped(reason: &str) -> Self {
        Verdict {
            outcome: Outcome::Skipped(reason.to_owned()),
            mode: None,
        }
    }

    pub fn with_mode(mut self, mode: CheckMode) -> Self {
        self.mode = Some(mode);
        self
    }

    pub fn from_witness(w: Option<Witness>) -> Self {
        w.map_or_else(Verdict::pass, Verdict::fail)
    }

    pub fn is_pass(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn is_fail(&self) -> bool {
        matches!(self.outcome, Outcome::Fail(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Outcome::Fail(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        !matches!(self.mode, Some(CheckMode::Sampled { .. }))
    }
}

/// Bounds for the second-order checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingBudget {
    /// Member sets up to this size get all subsets checked.
    pub separation_bound: usize,
    /// Member sets up to this size get all functions checked.
    pub replacement_bound: usize,
    /// Samples per element above the bounds, and per schema instance on large domains.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SamplingBudget {
    fn default() -> Self {
        SamplingBudget {
            separation_bound: 20,
            replacement_bound: 3,
            samples: 64,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemaMode {
    /// Semantic checks only.
    Skip,
    Battery,
    /// Battery plus all formulas up to the given AST size.
    Bounded {
        depth: usize,
    },
}

/// Runs every check for both tags.
pub fn full_report(s: &DualStructure, budget: &SamplingBudget, mode: SchemaMode) -> FullReport {
    let battery = match mode {
        SchemaMode::Skip => None,
        _ => Some(check_schema_battery(s, budget)),
    };
    let bounded = match mode {
        SchemaMode::Bounded { depth } => Some(check_bounded_schemas(
            s,
            &BoundedConfig {
                depth,
                ..BoundedConfig::default()
            },
        )),
        _ => None,
    };
    let reports = Tag::BOTH.map(|tag| {
        let r = s.relation(tag);
        let mut rep = AxiomReport::new(tag);
        rep.set(Axiom::Extensionality, check_extensionality(r));
        rep.set(Axiom::Foundation, check_foundation(r));
        rep.set(Axiom::Pairing, check_pairing(r));
        rep.set(Axiom::Union, check_union(r));
        rep.set(Axiom::PowerSet, check_power_set(r));
        rep.set(Axiom::SeparationSemantic, check_separation_semantic(r, budget));
        rep.set(Axiom::ReplacementSemantic, check_replacement_semantic(r, budget));
        for kind in [SchemaKind::Separation, SchemaKind::Replacement] {
            let axiom = kind.axiom();
            let Some(battery) = &battery else {
                rep.set(axiom, Verdict::skipped("semantic-mode"));
                continue;
            };
            let mut verdict = battery::aggregate(battery, tag, kind);
            if let Some(b) = &bounded {
                if verdict.is_pass() {
                    if let Some(w) = b.failure(tag, kind) {
                        verdict = Verdict::fail(w.clone());
                    }
                }
                verdict.mode = Some(CheckMode::Bounded(b.outcome.clone()));
            }
            rep.set(axiom, verdict);
        }
        rep
    });
    FullReport { reports }
}
