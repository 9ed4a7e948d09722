//! The global map `x ↦ m(x)` and its certificate or failure diagnostic.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{extend_to_level, is_ordinal, transitive_closure, IsoError, PsiWitness};
use crate::hf::HfUniverse;
use crate::structure::{DualStructure, ElementId, Permutation, Tag};

/// Renderings longer than this are elided in diagnostics.
const MAX_RENDER: usize = 256;

/// How an element's image was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pass {
    /// The element is an ordinal.
    Ordinal,
    /// The element lies below the internal level of some matched ordinal.
    Level,
    /// Neither: matched by recursion on its members.
    Direct,
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pass::Ordinal => "ordinal",
            Pass::Level => "level",
            Pass::Direct => "direct",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// `∈₁`-rank of the element.
    pub rank: u32,
    pub pass: Pass,
}

/// An isomorphism `(M, ∈₁) → (M, ∈₂)`: `map[x]` is the image of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoCertificate {
    pub map: Vec<ElementId>,
    /// Empty when the certificate was parsed rather than computed.
    pub provenance: Vec<Provenance>,
}

impl IsoCertificate {
    pub fn permutation(&self) -> Option<Permutation> {
        Permutation::new(self.map.clone()).ok()
    }
}

impl fmt::Display for IsoCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "iso {}", self.map.len())?;
        for (x, y) in self.map.iter().enumerate() {
            writeln!(f, "map {x} {y}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct CertificateParseError {
    pub line: usize,
    pub message: String,
}

impl FromStr for IsoCertificate {
    type Err = CertificateParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, message: &str| CertificateParseError {
            line,
            message: message.to_owned(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let n: usize = header
            .strip_prefix("iso ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| err(hl, "expected `iso N`"))?;
        let mut map: Vec<Option<ElementId>> = vec![None; n];
        for (ln, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let [_, x, y] = parts[..] else {
                return Err(err(ln, "expected `map X Y`"));
            };
            if parts[0] != "map" {
                return Err(err(ln, "expected `map X Y`"));
            }
            let x: ElementId = x.parse().map_err(|_| err(ln, "bad element"))?;
            let y: ElementId = y.parse().map_err(|_| err(ln, "bad element"))?;
            if x >= n || y >= n {
                return Err(err(ln, "element out of range"));
            }
            if map[x].replace(y).is_some() {
                return Err(err(ln, "element mapped twice"));
            }
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| err(0, &format!("no image for {x}"))))
            .collect::<Result<_, _>>()?;
        Ok(IsoCertificate {
            map,
            provenance: Vec::new(),
        })
    }
}

/// Which side has elements without a counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    BothDirectionsFail,
    E1ElementUnmatched,
    E2ElementUnmatched,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::BothDirectionsFail => "both-directions-fail",
            CaseTag::E1ElementUnmatched => "e1-element-unmatched",
            CaseTag::E2ElementUnmatched => "e2-element-unmatched",
        })
    }
}

/// An element with no counterpart under the other relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unmatched {
    pub tag: Tag,
    pub element: ElementId,
    pub rank: u32,
    /// Its Mostowski collapse, as nested braces, or `...` when long.
    pub collapse: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureDiagnostic {
    pub case: CaseTag,
    /// `∈₁` elements first, each side sorted by rank then id.
    pub unmatched: Vec<Unmatched>,
}

impl FailureDiagnostic {
    pub fn unmatched(&self, tag: Tag) -> impl Iterator<Item = &Unmatched> {
        self.unmatched.iter().filter(move |u| u.tag == tag)
    }
}

impl fmt::Display for FailureDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fail {}", self.case)?;
        for u in &self.unmatched {
            writeln!(
                f,
                "unmatched {} {} rank {} collapse {}",
                u.tag, u.element, u.rank, u.collapse
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoOutcome {
    Certificate(IsoCertificate),
    Failure(FailureDiagnostic),
}

impl fmt::Display for IsoOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoOutcome::Certificate(c) => c.fmt(f),
            IsoOutcome::Failure(d) => d.fmt(f),
        }
    }
}

/// Builds `m` over the whole domain. Both relations must be well-founded and extensional.
///
/// Ordinals are matched first, then everything below the level of each matched ordinal
/// (via [`extend_to_level`]), then the rest directly. All three passes must agree with `m`.
pub fn global_isomorphism(s: &DualStructure) -> Result<IsoOutcome, IsoError> {
    let n = s.domain_size();
    let mut ranks = Vec::with_capacity(2);
    for tag in Tag::BOTH {
        let r = s.relation(tag);
        ranks.push(r.ranks().map_err(|cycle| IsoError::IllFounded { tag, cycle })?);
        if let Some((a, b)) = r.extensionality_violation() {
            return Err(IsoError::NonExtensional { tag, a, b });
        }
    }
    let (e1, e2) = (s.e1(), s.e2());
    let realizer = e2.extension_index();
    let order = e1.topological_order().expect("acyclic");
    let mut m: Vec<Option<ElementId>> = vec![None; n];
    for &x in &order {
        let image: Option<Vec<ElementId>> = e1.members(x).iter().map(|&t| m[t]).collect();
        if let Some(mut image) = image {
            image.sort_unstable();
            m[x] = realizer.get(image.as_slice()).copied();
        }
    }

    let mut pass: Vec<Option<Pass>> = vec![None; n];
    for alpha in 0..n {
        let Some(y) = m[alpha] else { continue };
        if !is_ordinal(e1, alpha) {
            continue;
        }
        pass[alpha] = Some(Pass::Ordinal);
        if !is_ordinal(e2, y) {
            continue;
        }
        let w = PsiWitness {
            x: alpha,
            y,
            f: transitive_closure(e1, alpha, true)
                .into_iter()
                .map(|t| (t, m[t].expect("members of matched elements are matched")))
                .collect(),
        };
        // Levels missing from a finite structure just leave their elements to the direct pass.
        let Ok(ext) = extend_to_level(s, &w) else { continue };
        for (&u, &v) in &ext.f {
            if m[u] != Some(v) {
                return Err(IsoError::Disagreement {
                    t: u,
                    expected: m[u].unwrap_or(v),
                    found: v,
                });
            }
            pass[u].get_or_insert(Pass::Level);
        }
    }

    let mut hit = vec![false; n];
    for y in m.iter().flatten() {
        hit[*y] = true;
    }
    let mut u1: Vec<ElementId> = (0..n).filter(|&x| m[x].is_none()).collect();
    let mut u2: Vec<ElementId> = (0..n).filter(|&y| !hit[y]).collect();
    if u1.is_empty() && u2.is_empty() {
        let map = m.into_iter().map(Option::unwrap).collect();
        let provenance = (0..n)
            .map(|x| Provenance {
                rank: ranks[0][x],
                pass: pass[x].unwrap_or(Pass::Direct),
            })
            .collect();
        return Ok(IsoOutcome::Certificate(IsoCertificate { map, provenance }));
    }
    let case = match (u1.is_empty(), u2.is_empty()) {
        (false, false) => CaseTag::BothDirectionsFail,
        (false, true) => CaseTag::E1ElementUnmatched,
        _ => CaseTag::E2ElementUnmatched,
    };
    u1.sort_by_key(|&x| (ranks[0][x], x));
    u2.sort_by_key(|&x| (ranks[1][x], x));
    let mut hf = HfUniverse::new();
    let mut unmatched = Vec::new();
    for (tag, xs) in [(Tag::E1, u1), (Tag::E2, u2)] {
        let r = s.relation(tag);
        let rk = &ranks[usize::from(tag.index() - 1)];
        for x in xs {
            let code = hf.collapse(r, x).expect("acyclic").code;
            let mut collapse = hf.render(code);
            if collapse.len() > MAX_RENDER {
                collapse = "...".to_owned();
            }
            unmatched.push(Unmatched {
                tag,
                element: x,
                rank: rk[x],
                collapse,
            });
        }
    }
    Ok(IsoOutcome::Failure(FailureDiagnostic { case, unmatched }))
}

/// Why a map is not an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WrongLength {
        len: usize,
        size: usize,
    },
    /// `a` and `b` share an image, or an image is out of range (`a == b`).
    NotBijective {
        a: ElementId,
        b: ElementId,
    },
    /// `a ∈₁ b` differs from `map(a) ∈₂ map(b)`.
    Edge {
        a: ElementId,
        b: ElementId,
        in_e1: bool,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongLength { len, size } => write!(f, "length {len} for domain {size}"),
            Violation::NotBijective { a, b } if a == b => write!(f, "image of {a} out of range"),
            Violation::NotBijective { a, b } => write!(f, "{a} and {b} share an image"),
            Violation::Edge { a, b, in_e1: true } => {
                write!(f, "{a} in1 {b} but not image {a} in2 image {b}")
            }
            Violation::Edge { a, b, in_e1: false } => {
                write!(f, "image {a} in2 image {b} but not {a} in1 {b}")
            }
        }
    }
}

/// The first problem with `c`, edges compared in lexicographic `(a, b)` order.
pub fn find_violation(s: &DualStructure, c: &IsoCertificate) -> Option<Violation> {
    let n = s.domain_size();
    if c.map.len() != n {
        return Some(Violation::WrongLength {
            len: c.map.len(),
            size: n,
        });
    }
    let mut inverse: Vec<Option<ElementId>> = vec![None; n];
    for (x, &y) in c.map.iter().enumerate() {
        if y >= n {
            return Some(Violation::NotBijective { a: x, b: x });
        }
        if let Some(a) = inverse[y] {
            return Some(Violation::NotBijective { a, b: x });
        }
        inverse[y] = Some(x);
    }
    let inverse: Vec<ElementId> = inverse.into_iter().map(Option::unwrap).collect();
    let forward: BTreeSet<(ElementId, ElementId)> = s.e1().edges().collect();
    let pulled: BTreeSet<(ElementId, ElementId)> =
        s.e2().edges().map(|(a, b)| (inverse[a], inverse[b])).collect();
    let first1 = forward.difference(&pulled).next();
    let first2 = pulled.difference(&forward).next();
    match (first1, first2) {
        (None, None) => None,
        (Some(&(a, b)), other) if other.is_none_or(|o| (a, b) < *o) => {
            Some(Violation::Edge { a, b, in_e1: true })
        }
        (_, Some(&(a, b))) => Some(Violation::Edge { a, b, in_e1: false }),
        (Some(_), None) => unreachable!(),
    }
}

pub fn verify_certificate(s: &DualStructure, c: &IsoCertificate) -> bool {
    find_violation(s, c).is_none()
}
