//! Line-oriented text format for dual structures.
//!
//! ```text
//! # optional comments
//! n 4
//! e1 0 1
//! e2 0 1
//! ```
//!
//! `e1 a b` reads "a ∈₁ b". Duplicate edges are errors; line order is irrelevant.

use std::fmt::Write as _;

use thiserror::Error;

use super::{DualStructure, ElementId, MembershipRelation, Tag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `n <N>` header")]
    MissingHeader,
    #[error("second `n` header")]
    DuplicateHeader,
    #[error("duplicate edge {tag} {child} {parent}")]
    DuplicateEdge {
        tag: Tag,
        child: ElementId,
        parent: ElementId,
    },
    #[error("vertex id {id} is not below N = {size}")]
    IdOutOfRange { id: ElementId, size: usize },
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("expected {expected} fields, found {found}")]
    WrongArity { expected: usize, found: usize },
}

fn number(token: &str) -> Result<usize, ParseErrorKind> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseErrorKind::MalformedToken(token.to_owned()));
    }
    token
        .parse()
        .map_err(|_| ParseErrorKind::MalformedToken(token.to_owned()))
}

pub fn parse_structure(text: &str) -> Result<DualStructure, ParseError> {
    let mut relations: Option<[MembershipRelation; 2]> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let err = |kind| ParseError { line, kind };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match fields[0] {
            "n" => {
                if relations.is_some() {
                    return Err(err(ParseErrorKind::DuplicateHeader));
                }
                if fields.len() != 2 {
                    return Err(err(ParseErrorKind::WrongArity {
                        expected: 2,
                        found: fields.len(),
                    }));
                }
                let n = number(fields[1]).map_err(err)?;
                relations = Some([MembershipRelation::empty(n), MembershipRelation::empty(n)]);
            }
            kw @ ("e1" | "e2") => {
                let Some(rels) = relations.as_mut() else {
                    return Err(err(ParseErrorKind::MissingHeader));
                };
                if fields.len() != 3 {
                    return Err(err(ParseErrorKind::WrongArity {
                        expected: 3,
                        found: fields.len(),
                    }));
                }
                let child = number(fields[1]).map_err(err)?;
                let parent = number(fields[2]).map_err(err)?;
                let tag = if kw == "e1" { Tag::E1 } else { Tag::E2 };
                let rel = &mut rels[(tag.index() - 1) as usize];
                let size = rel.domain_size();
                for id in [child, parent] {
                    if id >= size {
                        return Err(err(ParseErrorKind::IdOutOfRange { id, size }));
                    }
                }
                if !rel.insert(child, parent).expect("ids checked above") {
                    return Err(err(ParseErrorKind::DuplicateEdge { tag, child, parent }));
                }
            }
            other => return Err(err(ParseErrorKind::MalformedToken(other.to_owned()))),
        }
    }
    let [e1, e2] = relations.ok_or(ParseError {
        line: last_line + 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    Ok(DualStructure::new(e1, e2).expect("both relations share the header size"))
}

/// Canonical text: header, then `e1` edges sorted by (parent, child), then `e2` edges.
pub fn serialize_structure(s: &DualStructure) -> String {
    let mut out = format!("n {}\n", s.domain_size());
    for tag in Tag::BOTH {
        for (child, parent) in s.relation(tag).edges() {
            writeln!(out, "{tag} {child} {parent}").unwrap();
        }
    }
    out
}
