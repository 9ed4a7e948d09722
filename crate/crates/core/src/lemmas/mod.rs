//! Executable checks of the lemma chain behind the global isomorphism.
//!
//! Lemmas 1 to 5 only use the shape of ψ, so they are checked on every well-founded
//! extensional structure. Lemmas 6, 7 and the proposition rely on the schemas and are
//! checked only when the axiom battery passes for both relations, except that the
//! proposition is always reported, as a pass or as the failure diagnostic.

mod brute;
mod corpus;
mod gallery;

pub use brute::{count_psi_witnesses, WitnessCount, DEFAULT_BUDGET};
pub use corpus::{run_corpus, CorpusConfig, CorpusConfigError, CorpusItem, CorpusReport};
pub use gallery::{counterexample_gallery, gallery_summary, GalleryItem};

use std::fmt;

use crate::axioms::{full_report, SamplingBudget, SchemaMode};
use crate::iso::{
    extend_to_level, global_isomorphism, is_ordinal, transitive_closure, verify_certificate, IsoOutcome,
    PhiEngine, PsiWitness,
};
use crate::structure::{DualStructure, ElementId, Tag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lemma {
    Uniqueness,
    Restriction,
    Injectivity,
    Membership,
    Ordinals,
    LevelExtension,
    Totality,
    Proposition,
}

impl Lemma {
    pub const ALL: [Lemma; 8] = [
        Lemma::Uniqueness,
        Lemma::Restriction,
        Lemma::Injectivity,
        Lemma::Membership,
        Lemma::Ordinals,
        Lemma::LevelExtension,
        Lemma::Totality,
        Lemma::Proposition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Uniqueness => "lemma-1-uniqueness",
            Lemma::Restriction => "lemma-2-restriction",
            Lemma::Injectivity => "lemma-3-injectivity",
            Lemma::Membership => "lemma-4-membership",
            Lemma::Ordinals => "lemma-5-ordinals",
            Lemma::LevelExtension => "lemma-6-level-extension",
            Lemma::Totality => "lemma-7-totality",
            Lemma::Proposition => "proposition",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaVerdict {
    /// `detail` says how much was checked.
    Pass {
        detail: String,
    },
    Fail {
        witness: String,
    },
    NotApplicable {
        reason: String,
        witness: Option<String>,
    },
}

impl LemmaVerdict {
    fn pass(detail: impl Into<String>) -> Self {
        LemmaVerdict::Pass {
            detail: detail.into(),
        }
    }

    fn fail(witness: impl Into<String>) -> Self {
        LemmaVerdict::Fail {
            witness: witness.into(),
        }
    }

    fn na(reason: &str, witness: Option<String>) -> Self {
        LemmaVerdict::NotApplicable {
            reason: reason.to_owned(),
            witness,
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, LemmaVerdict::Pass { .. })
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, LemmaVerdict::Fail { .. })
    }

    pub fn status(&self) -> &'static str {
        match self {
            LemmaVerdict::Pass { .. } => "pass",
            LemmaVerdict::Fail { .. } => "fail",
            LemmaVerdict::NotApplicable { .. } => "n/a",
        }
    }
}

impl fmt::Display for LemmaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LemmaVerdict::Pass { detail } if detail.is_empty() => f.write_str("pass"),
            LemmaVerdict::Pass { detail } => write!(f, "pass {detail}"),
            LemmaVerdict::Fail { witness } => write!(f, "fail {witness}"),
            LemmaVerdict::NotApplicable { reason, witness } => {
                write!(f, "n/a reason={reason}")?;
                if let Some(w) = witness {
                    write!(f, " {w}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub budget: SamplingBudget,
    /// Lemma 1 is brute-forced for `x` with `|TC₁({x})|` at most this.
    pub brute_force_closure: usize,
    /// Above this domain size, pair-based checks use only the pairs related by φ.
    pub all_pairs_limit: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            budget: SamplingBudget::default(),
            brute_force_closure: 4,
            all_pairs_limit: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub verdicts: Vec<(Lemma, LemmaVerdict)>,
    pub size: usize,
}

impl SuiteReport {
    pub fn get(&self, lemma: Lemma) -> &LemmaVerdict {
        &self
            .verdicts
            .iter()
            .find(|(l, _)| *l == lemma)
            .expect("every lemma is reported")
            .1
    }

    pub fn has_failure(&self) -> bool {
        self.verdicts.iter().any(|(_, v)| v.is_fail())
    }

    /// `pass`, `fail` or `n/a` per lemma, in order.
    pub fn statuses(&self) -> Vec<&'static str> {
        self.verdicts.iter().map(|(_, v)| v.status()).collect()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (lemma, v) in &self.verdicts {
            writeln!(f, "lemma {lemma} {v}")?;
        }
        writeln!(f, "corpus seeds=none sizes={}", self.size)
    }
}

fn precondition_failure(s: &DualStructure) -> Option<(&'static str, String)> {
    for tag in Tag::BOTH {
        if let Some(c) = s.relation(tag).find_cycle() {
            let ids: Vec<String> = c.0.iter().map(|x| x.to_string()).collect();
            return Some(("ill-founded", format!("{tag} cycle={}", ids.join(","))));
        }
    }
    for tag in Tag::BOTH {
        if let Some((a, b)) = s.relation(tag).extensionality_violation() {
            return Some(("non-extensional", format!("{tag} pair={a},{b}")));
        }
    }
    None
}

pub fn run_suite(s: &DualStructure, config: &SuiteConfig) -> SuiteReport {
    let n = s.domain_size();
    let report = |verdicts: Vec<LemmaVerdict>| SuiteReport {
        verdicts: Lemma::ALL.into_iter().zip(verdicts).collect(),
        size: n,
    };
    if let Some((reason, witness)) = precondition_failure(s) {
        return report(vec![LemmaVerdict::na(reason, Some(witness)); Lemma::ALL.len()]);
    }

    let mut engine = PhiEngine::new(s);
    let mut m: Vec<Option<ElementId>> = Vec::with_capacity(n);
    for x in 0..n {
        let y = engine.matching(x).expect("checked acyclic");
        let related = match y {
            Some(y) => engine.phi(x, y).expect("checked acyclic"),
            None => false,
        };
        m.push(if related { y } else { None });
    }
    let all_pairs = n <= config.all_pairs_limit;
    let phi_pairs: Vec<(ElementId, ElementId)> = if all_pairs {
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if engine.phi(x, y).expect("checked acyclic") {
                    out.push((x, y));
                }
            }
        }
        out
    } else {
        (0..n).filter_map(|x| m[x].map(|y| (x, y))).collect()
    };

    let mut verdicts = vec![
        lemma_uniqueness(s, config, &phi_pairs, all_pairs),
        lemma_restriction(s, &mut engine, &phi_pairs),
        lemma_injectivity(&phi_pairs),
        lemma_membership(s, &phi_pairs),
        lemma_ordinals(s, &phi_pairs),
    ];

    let axioms = full_report(s, &config.budget, SchemaMode::Battery);
    if axioms.all_pass() {
        verdicts.push(lemma_level_extension(s, &mut engine, &m));
        verdicts.push(lemma_totality(&m));
    } else {
        let first = Tag::BOTH
            .iter()
            .find_map(|&t| axioms.relation(t).failures().next().map(|a| format!("{t} {a}")));
        verdicts.push(LemmaVerdict::na("axioms-fail", first.clone()));
        verdicts.push(LemmaVerdict::na("axioms-fail", first));
    }
    verdicts.push(proposition(s));
    report(verdicts)
}

fn lemma_uniqueness(
    s: &DualStructure,
    config: &SuiteConfig,
    phi_pairs: &[(ElementId, ElementId)],
    all_pairs: bool,
) -> LemmaVerdict {
    let n = s.domain_size();
    let small: Vec<ElementId> = (0..n)
        .filter(|&x| transitive_closure(s.e1(), x, true).len() <= config.brute_force_closure)
        .collect();
    let candidates: Vec<(ElementId, ElementId)> = if all_pairs {
        small.iter().flat_map(|&x| (0..n).map(move |y| (x, y))).collect()
    } else {
        phi_pairs
            .iter()
            .copied()
            .filter(|(x, _)| small.binary_search(x).is_ok())
            .collect()
    };
    let (mut checked, mut skipped) = (0usize, 0usize);
    for (x, y) in candidates {
        let expected = usize::from(phi_pairs.binary_search(&(x, y)).is_ok());
        match count_psi_witnesses(s, x, y, brute::DEFAULT_BUDGET) {
            WitnessCount::Counted(k) if k == expected => checked += 1,
            WitnessCount::Counted(k) => {
                return LemmaVerdict::fail(format!("x={x} y={y} witnesses={k} expected={expected}"))
            }
            WitnessCount::TooLarge => skipped += 1,
        }
    }
    LemmaVerdict::pass(format!("pairs={checked} skipped={skipped}"))
}

fn lemma_restriction(
    s: &DualStructure,
    engine: &mut PhiEngine<'_>,
    phi_pairs: &[(ElementId, ElementId)],
) -> LemmaVerdict {
    let mut checked = 0usize;
    for &(x, y) in phi_pairs {
        let w = engine
            .build_psi(x, y)
            .expect("checked acyclic")
            .expect("phi holds");
        for &x1 in s.e1().members(x) {
            let y1 = w.f[&x1];
            let expected = w.restrict(s, x1);
            match engine.build_psi(x1, y1).expect("checked acyclic") {
                Some(w1) if w1 == expected => checked += 1,
                _ => return LemmaVerdict::fail(format!("x={x} y={y} member={x1} image={y1}")),
            }
        }
    }
    LemmaVerdict::pass(format!("pairs={checked}"))
}

fn lemma_injectivity(phi_pairs: &[(ElementId, ElementId)]) -> LemmaVerdict {
    for w in phi_pairs.windows(2) {
        if w[0].0 == w[1].0 {
            return LemmaVerdict::fail(format!("x={} y={} y'={}", w[0].0, w[0].1, w[1].1));
        }
    }
    let mut by_y: Vec<(ElementId, ElementId)> = phi_pairs.iter().map(|&(x, y)| (y, x)).collect();
    by_y.sort_unstable();
    for w in by_y.windows(2) {
        if w[0].0 == w[1].0 {
            return LemmaVerdict::fail(format!("y={} x={} x'={}", w[0].0, w[0].1, w[1].1));
        }
    }
    LemmaVerdict::pass(format!("pairs={}", phi_pairs.len()))
}

fn lemma_membership(s: &DualStructure, phi_pairs: &[(ElementId, ElementId)]) -> LemmaVerdict {
    let n = s.domain_size();
    let mut fwd = vec![None; n];
    let mut back = vec![None; n];
    for &(x, y) in phi_pairs {
        fwd[x] = Some(y);
        back[y] = Some(x);
    }
    let mut bad: Option<(ElementId, ElementId)> = None;
    let mut note = |a: ElementId, b: ElementId| {
        if bad.is_none_or(|p| (a, b) < p) {
            bad = Some((a, b));
        }
    };
    for (a, b) in s.e1().edges() {
        if let (Some(fa), Some(fb)) = (fwd[a], fwd[b]) {
            if !s.e2().contains(fa, fb) {
                note(a, b);
            }
        }
    }
    for (c, d) in s.e2().edges() {
        if let (Some(a), Some(b)) = (back[c], back[d]) {
            if !s.e1().contains(a, b) {
                note(a, b);
            }
        }
    }
    match bad {
        Some((a, b)) => LemmaVerdict::fail(format!("x={a} x'={b}")),
        None => LemmaVerdict::pass(format!("pairs={}", phi_pairs.len())),
    }
}

fn lemma_ordinals(s: &DualStructure, phi_pairs: &[(ElementId, ElementId)]) -> LemmaVerdict {
    let mut ordinals = 0usize;
    for &(x, y) in phi_pairs {
        let (o1, o2) = (is_ordinal(s.e1(), x), is_ordinal(s.e2(), y));
        if o1 != o2 {
            return LemmaVerdict::fail(format!("x={x} y={y} ordinal1={o1} ordinal2={o2}"));
        }
        ordinals += usize::from(o1);
    }
    LemmaVerdict::pass(format!("ordinals={ordinals}"))
}

/// For each matched ordinal, the level extension agrees with the global matching.
fn lemma_level_extension(
    s: &DualStructure,
    engine: &mut PhiEngine<'_>,
    m: &[Option<ElementId>],
) -> LemmaVerdict {
    let mut levels = 0usize;
    for alpha in 0..s.domain_size() {
        let Some(y) = m[alpha] else { continue };
        if !is_ordinal(s.e1(), alpha) {
            continue;
        }
        let w: PsiWitness = engine
            .build_psi(alpha, y)
            .expect("checked acyclic")
            .expect("phi holds");
        match extend_to_level(s, &w) {
            Ok(ext) => {
                if let Some((&u, &v)) = ext.f.iter().find(|(&u, &v)| m[u] != Some(v)) {
                    return LemmaVerdict::fail(format!("alpha={alpha} u={u} image={v}"));
                }
                levels += 1;
            }
            Err(e) => return LemmaVerdict::fail(format!("alpha={alpha} error=\"{e}\"")),
        }
    }
    LemmaVerdict::pass(format!("levels={levels}"))
}

fn lemma_totality(m: &[Option<ElementId>]) -> LemmaVerdict {
    if let Some(x) = m.iter().position(Option::is_none) {
        return LemmaVerdict::fail(format!("e1 x={x}"));
    }
    let mut hit = vec![false; m.len()];
    for y in m.iter().flatten() {
        hit[*y] = true;
    }
    match hit.iter().position(|h| !h) {
        Some(y) => LemmaVerdict::fail(format!("e2 y={y}")),
        None => LemmaVerdict::pass(""),
    }
}

fn proposition(s: &DualStructure) -> LemmaVerdict {
    match global_isomorphism(s) {
        Ok(IsoOutcome::Certificate(c)) if verify_certificate(s, &c) => LemmaVerdict::pass("verified"),
        Ok(IsoOutcome::Certificate(_)) => LemmaVerdict::fail("certificate-rejected"),
        Ok(IsoOutcome::Failure(d)) => {
            let mut w = format!("case={}", d.case);
            for u in &d.unmatched {
                w.push_str(&format!(" {}:{}={}", u.tag, u.element, u.collapse));
            }
            LemmaVerdict::fail(w)
        }
        Err(e) => LemmaVerdict::fail(format!("error=\"{e}\"")),
    }
}
