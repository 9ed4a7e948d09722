//! Seeded corpora of scrambled universes and random extensional pairs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use super::{run_suite, Lemma, LemmaVerdict, SuiteConfig};
use crate::hf::HfUniverse;
use crate::structure::{build_v_universe, random_pair, scramble, DualStructure, Permutation};

/// `sizes=3,4 count=100 seed=1 pairs=6,7`. `sizes` are universe levels, `pairs` are domain
/// sizes of random pairs. Missing keys mean empty lists, `count=0` and `seed=0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusConfig {
    pub sizes: Vec<usize>,
    pub pairs: Vec<usize>,
    pub count: u64,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusConfigError {
    #[error("expected key=value, got `{0}`")]
    Token(String),
    #[error("unknown key `{0}`")]
    Key(String),
    #[error("bad number in `{0}`")]
    Number(String),
    #[error("universe level {0} is too large")]
    Level(usize),
}

impl FromStr for CorpusConfig {
    type Err = CorpusConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = CorpusConfig::default();
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| CorpusConfigError::Token(tok.to_owned()))?;
            let num = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| CorpusConfigError::Number(tok.to_owned()))
            };
            let list = |v: &str| -> Result<Vec<usize>, CorpusConfigError> {
                if v.is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',')
                    .map(|x| x.parse().map_err(|_| CorpusConfigError::Number(tok.to_owned())))
                    .collect()
            };
            match k {
                "sizes" => c.sizes = list(v)?,
                "pairs" => c.pairs = list(v)?,
                "count" => c.count = num(v)?,
                "seed" => c.seed = num(v)?,
                _ => return Err(CorpusConfigError::Key(k.to_owned())),
            }
        }
        if let Some(&n) = c.sizes.iter().find(|&&n| build_v_universe(n).is_err()) {
            return Err(CorpusConfigError::Level(n));
        }
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusItem {
    /// `V_n` with `∈₂` scrambled by the permutation drawn from `seed`.
    Universe {
        n: usize,
        seed: u64,
    },
    Pair {
        size: usize,
        seed: u64,
    },
}

impl CorpusItem {
    pub fn structure(&self) -> DualStructure {
        match *self {
            CorpusItem::Universe { n, seed } => {
                let v = build_v_universe(n).expect("level checked when parsing");
                let p = Permutation::random(v.domain_size(), seed);
                scramble(&v, &p).expect("sizes agree")
            }
            CorpusItem::Pair { size, seed } => random_pair(size, seed),
        }
    }
}

impl fmt::Display for CorpusItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusItem::Universe { n, seed } => write!(f, "v{n}:seed={seed}"),
            CorpusItem::Pair { size, seed } => write!(f, "pair{size}:seed={seed}"),
        }
    }
}

impl CorpusConfig {
    /// Ordered by seed, then universes before pairs, each in config order.
    pub fn items(&self) -> Vec<CorpusItem> {
        let mut out = Vec::new();
        for seed in self.seed..self.seed + self.count {
            out.extend(self.sizes.iter().map(|&n| CorpusItem::Universe { n, seed }));
            out.extend(self.pairs.iter().map(|&size| CorpusItem::Pair { size, seed }));
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaTally {
    pub applicable: usize,
    pub not_applicable: usize,
    pub failure: Option<(CorpusItem, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusReport {
    pub config: CorpusConfig,
    pub tallies: Vec<(Lemma, LemmaTally)>,
    /// Random pairs found isomorphic and not, each in agreement with the collapse oracle.
    pub iso: usize,
    pub non_iso: usize,
    /// The first item with a failing lemma; later items are not tallied.
    pub halted: Option<CorpusItem>,
}

impl CorpusReport {
    pub fn has_failure(&self) -> bool {
        self.halted.is_some()
    }
}

fn collapse_images_agree(s: &DualStructure) -> bool {
    let mut u = HfUniverse::new();
    let mut a = u.collapse_all(s.e1()).expect("acyclic").codes;
    let mut b = u.collapse_all(s.e2()).expect("acyclic").codes;
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Runs the suite on every item in parallel and tallies in item order.
///
/// For random pairs a failing proposition is expected when the collapse images differ; it
/// counts as a failure only when it disagrees with that oracle.
pub fn run_corpus(config: &CorpusConfig, suite: &SuiteConfig) -> CorpusReport {
    let items = config.items();
    let results: Vec<_> = items
        .par_iter()
        .map(|item| {
            let s = item.structure();
            let mut r = run_suite(&s, suite);
            let mut iso = None;
            if let CorpusItem::Pair { .. } = item {
                let oracle = collapse_images_agree(&s);
                let found = r.get(Lemma::Proposition).is_pass();
                iso = Some(found);
                let slot = r
                    .verdicts
                    .iter_mut()
                    .find(|(l, _)| *l == Lemma::Proposition)
                    .unwrap();
                if oracle != found {
                    slot.1 = LemmaVerdict::fail(format!("oracle-iso={oracle} found-iso={found}"));
                } else if !found {
                    slot.1 = LemmaVerdict::pass("non-iso");
                }
            }
            (r, iso)
        })
        .collect();

    let mut report = CorpusReport {
        config: config.clone(),
        tallies: Lemma::ALL.iter().map(|&l| (l, LemmaTally::default())).collect(),
        iso: 0,
        non_iso: 0,
        halted: None,
    };
    if items.is_empty() {
        report.tallies.clear();
    }
    for (item, (r, iso)) in items.iter().zip(results) {
        for ((_, tally), (_, v)) in report.tallies.iter_mut().zip(&r.verdicts) {
            match v {
                LemmaVerdict::Pass { .. } => tally.applicable += 1,
                LemmaVerdict::NotApplicable { .. } => tally.not_applicable += 1,
                LemmaVerdict::Fail { witness } => {
                    tally.applicable += 1;
                    tally.failure.get_or_insert((*item, witness.clone()));
                }
            }
        }
        match iso {
            Some(true) => report.iso += 1,
            Some(false) => report.non_iso += 1,
            None => {}
        }
        if r.has_failure() {
            report.halted = Some(*item);
            break;
        }
    }
    report
}

fn list(v: &[usize]) -> String {
    if v.is_empty() {
        return "none".into();
    }
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (lemma, t) in &self.tallies {
            match &t.failure {
                Some((item, w)) => writeln!(f, "lemma {lemma} fail item={item} {w}")?,
                None if t.applicable > 0 => writeln!(
                    f,
                    "lemma {lemma} pass applicable={} n/a={}",
                    t.applicable, t.not_applicable
                )?,
                None => writeln!(f, "lemma {lemma} n/a applicable=0 n/a={}", t.not_applicable)?,
            }
        }
        let c = &self.config;
        if c.count == 0 || (c.sizes.is_empty() && c.pairs.is_empty()) {
            write!(f, "corpus seeds=none")?;
        } else {
            write!(f, "corpus seeds={}..{}", c.seed, c.seed + c.count - 1)?;
        }
        write!(f, " sizes={}", list(&c.sizes))?;
        if !c.pairs.is_empty() {
            write!(
                f,
                " pairs={} iso={} non-iso={}",
                list(&c.pairs),
                self.iso,
                self.non_iso
            )?;
        }
        if let Some(item) = self.halted {
            write!(f, " halted={item}")?;
        }
        writeln!(f)
    }
}
