//! Text form of axiom reports: one line per axiom,
//! `<tag> <axiom> pass|fail|skipped [key=value…] [mode=…]`, sorted by tag then axiom.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Axiom, BoundedOutcome, CheckMode, Outcome, SubsetWitness, Verdict, Witness};
use crate::structure::{Cycle, ElementId, Tag};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub tag: Tag,
    verdicts: BTreeMap<Axiom, Verdict>,
}

impl AxiomReport {
    pub fn new(tag: Tag) -> Self {
        AxiomReport {
            tag,
            verdicts: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, axiom: Axiom, v: Verdict) {
        self.verdicts.insert(axiom, v);
    }

    /// Panics when the axiom was not checked.
    pub fn get(&self, axiom: Axiom) -> &Verdict {
        &self.verdicts[&axiom]
    }

    pub fn verdicts(&self) -> impl Iterator<Item = (Axiom, &Verdict)> {
        self.verdicts.iter().map(|(a, v)| (*a, v))
    }

    pub fn failures(&self) -> impl Iterator<Item = Axiom> + '_ {
        self.verdicts().filter(|(_, v)| v.is_fail()).map(|(a, _)| a)
    }

    /// Extensionality, foundation, pairing, union, power set and semantic separation all
    /// pass, the last exhaustively.
    pub fn characterizes_v_level(&self) -> bool {
        Axiom::CHARACTERIZING.iter().all(|a| {
            let v = self.get(*a);
            v.is_pass() && v.is_exhaustive()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullReport {
    pub reports: [AxiomReport; 2],
}

impl FullReport {
    pub fn relation(&self, tag: Tag) -> &AxiomReport {
        &self.reports[usize::from(tag.index() - 1)]
    }

    /// No verdict is a failure.
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.failures().next().is_none())
    }
}

fn set_text(v: &[ElementId]) -> String {
    let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn list_text(v: &[ElementId]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn witness_tokens(w: &Witness) -> Vec<String> {
    match w {
        Witness::Duplicate(a, b) => vec![format!("pair={a},{b}")],
        Witness::Cycle(c) => vec![format!("cycle={}", list_text(&c.0))],
        Witness::Missing { at, target } => {
            vec![
                format!("at={}", list_text(at)),
                format!("missing={}", set_text(target)),
            ]
        }
        Witness::Subset(s) => vec![
            format!("base={}", s.base),
            format!("subset={}", set_text(&s.members)),
        ],
        Witness::Image { base, map, image } => {
            let m: Vec<String> = map.iter().map(|(a, b)| format!("{a}:{b}")).collect();
            vec![
                format!("base={base}"),
                format!("map={}", m.join(",")),
                format!("missing={}", set_text(image)),
            ]
        }
        Witness::Instance {
            name,
            formula,
            assignment,
        } => {
            let mut t = vec![format!("instance={name}")];
            if let Some(f) = formula {
                t.push(format!("formula=\"{f}\""));
            }
            t.push(format!("assign={assignment}"));
            t
        }
    }
}

impl fmt::Display for FullReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reports {
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (axiom, v) in &self.verdicts {
            let mut tokens = vec![self.tag.to_string(), axiom.to_string()];
            match &v.outcome {
                Outcome::Pass => tokens.push("pass".into()),
                Outcome::Fail(w) => {
                    tokens.push("fail".into());
                    tokens.extend(witness_tokens(w));
                }
                Outcome::Skipped(reason) => {
                    tokens.push("skipped".into());
                    tokens.push(format!("reason={reason}"));
                }
            }
            if let Some(m) = &v.mode {
                tokens.push(format!("mode={m}"));
            }
            writeln!(f, "{}", tokens.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("report line {line}: {message}")]
pub struct ReportParseError {
    pub line: usize,
    pub message: String,
}

/// Splits on spaces, keeping `"…"` quoted values intact.
fn tokenize(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => quoted = !quoted,
            ' ' if !quoted => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            _ => cur.push(c),
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

fn parse_list(s: &str) -> Result<Vec<ElementId>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.parse().map_err(|_| format!("bad element `{x}`")))
        .collect()
}

fn parse_set(s: &str) -> Result<Vec<ElementId>, String> {
    let inner = s
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| format!("bad set `{s}`"))?;
    parse_list(inner)
}

fn parse_mode(s: &str) -> Result<CheckMode, String> {
    let bad = || format!("bad mode `{s}`");
    match s {
        "exhaustive" => return Ok(CheckMode::Exhaustive),
        "battery" => return Ok(CheckMode::Battery),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("sampled:") {
        let (n, seed) = rest.split_once(",seed=").ok_or_else(bad)?;
        return Ok(CheckMode::Sampled {
            samples: n.parse().map_err(|_| bad())?,
            seed: seed.parse().map_err(|_| bad())?,
        });
    }
    let rest = s.strip_prefix("battery+bounded:").ok_or_else(bad)?;
    if rest == "skipped" {
        // The domain size is not part of the text form.
        return Ok(CheckMode::Bounded(BoundedOutcome::Skipped { domain: 0 }));
    }
    let mut fields = BTreeMap::new();
    let mut truncated = false;
    for part in rest.split(',') {
        match part.split_once('=') {
            Some((k, v)) => {
                fields.insert(k, v.parse::<usize>().map_err(|_| bad())?);
            }
            None if part == "truncated" => truncated = true,
            None => return Err(bad()),
        }
    }
    let field = |k: &str| fields.get(k).copied().ok_or_else(bad);
    Ok(CheckMode::Bounded(BoundedOutcome::Ran {
        depth: field("k")?,
        reached: field("size")?,
        classes: field("classes")?,
        candidates: field("candidates")?,
        truncated,
    }))
}

fn parse_witness(fields: &BTreeMap<&str, &str>) -> Result<Witness, String> {
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing `{k}`"));
    if let Some(p) = fields.get("pair") {
        let v = parse_list(p)?;
        let [a, b] = v[..] else {
            return Err("pair needs two elements".into());
        };
        return Ok(Witness::Duplicate(a, b));
    }
    if let Some(c) = fields.get("cycle") {
        return Ok(Witness::Cycle(Cycle(parse_list(c)?)));
    }
    if let Some(at) = fields.get("at") {
        return Ok(Witness::Missing {
            at: parse_list(at)?,
            target: parse_set(get("missing")?)?,
        });
    }
    if let Some(name) = fields.get("instance") {
        return Ok(Witness::Instance {
            name: name.to_string(),
            formula: fields.get("formula").map(|f| f.to_string()),
            assignment: get("assign")?.parse().map_err(|e| format!("{e}"))?,
        });
    }
    let base: ElementId = get("base")?.parse().map_err(|_| "bad base".to_string())?;
    if let Some(sub) = fields.get("subset") {
        return Ok(Witness::Subset(SubsetWitness {
            base,
            members: parse_set(sub)?,
        }));
    }
    let map = get("map")?
        .split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| format!("bad map entry `{p}`"))?;
            Ok((
                a.parse().map_err(|_| format!("bad map entry `{p}`"))?,
                b.parse().map_err(|_| format!("bad map entry `{p}`"))?,
            ))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(Witness::Image {
        base,
        map,
        image: parse_set(get("missing")?)?,
    })
}

fn parse_line(line: &str) -> Result<(Tag, Axiom, Verdict), String> {
    let tokens = tokenize(line)?;
    let [tag, axiom, status, rest @ ..] = &tokens[..] else {
        return Err("expected `<tag> <axiom> <status>`".into());
    };
    let tag = match tag.as_str() {
        "e1" => Tag::E1,
        "e2" => Tag::E2,
        _ => return Err(format!("bad tag `{tag}`")),
    };
    let axiom = Axiom::from_name(axiom).ok_or_else(|| format!("unknown axiom `{axiom}`"))?;
    let mut fields = BTreeMap::new();
    for t in rest {
        let (k, v) = t.split_once('=').ok_or_else(|| format!("bad field `{t}`"))?;
        fields.insert(k, v);
    }
    let mode = fields.remove("mode").map(parse_mode).transpose()?;
    let outcome = match status.as_str() {
        "pass" => Outcome::Pass,
        "skipped" => Outcome::Skipped(fields.get("reason").ok_or("missing `reason`")?.to_string()),
        "fail" => Outcome::Fail(parse_witness(&fields)?),
        _ => return Err(format!("bad status `{status}`")),
    };
    Ok((tag, axiom, Verdict { outcome, mode }))
}

impl FromStr for FullReport {
    type Err = ReportParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut reports = Tag::BOTH.map(AxiomReport::new);
        for (i, line) in s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let (tag, axiom, v) =
                parse_line(line).map_err(|message| ReportParseError { line: i + 1, message })?;
            reports[usize::from(tag.index() - 1)].set(axiom, v);
        }
        Ok(FullReport { reports })
    }
}
