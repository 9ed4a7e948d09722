//! Recursive-descent parser for the formula grammar.

use thiserror::Error;

use super::Formula;
use crate::structure::Tag;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at position {pos}: {kind}")]
pub struct FormulaParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: FormulaParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaParseErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("quantifier needs a variable and a body")]
    DanglingQuantifier,
    #[error("unexpected `{0}`")]
    Unexpected(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
}

const KEYWORDS: [&str; 6] = ["true", "false", "forall", "exists", "in1", "in2"];

pub(super) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    ForAll,
    Exists,
    In(Tag),
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    LParen,
    RParen,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::True => "true".into(),
            Tok::False => "false".into(),
            Tok::ForAll => "forall".into(),
            Tok::Exists => "exists".into(),
            Tok::In(t) => format!("in{}", t.index()),
            Tok::Not => "!".into(),
            Tok::And => "&".into(),
            Tok::Or => "|".into(),
            Tok::Implies => "->".into(),
            Tok::Iff => "<->".into(),
            Tok::Eq => "=".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Some((Tok::Not, 1)),
            b'&' => Some((Tok::And, 1)),
            b'|' => Some((Tok::Or, 1)),
            b'=' => Some((Tok::Eq, 1)),
            b'(' => Some((Tok::LParen, 1)),
            b')' => Some((Tok::RParen, 1)),
            b'-' if bytes.get(i + 1) == Some(&b'>') => Some((Tok::Implies, 2)),
            b'<' if bytes[i..].starts_with(b"<->") => Some((Tok::Iff, 3)),
            _ => None,
        };
        if let Some((tok, len)) = simple {
            out.push((start, tok));
            i += len;
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                "forall" => Tok::ForAll,
                "exists" => Tok::Exists,
                "in1" => Tok::In(Tag::E1),
                "in2" => Tok::In(Tag::E2),
                _ => Tok::Ident(word.to_owned()),
            };
            out.push((start, tok));
            continue;
        }
        let ch = text[i..].chars().next().unwrap();
        return Err(FormulaParseError {
            pos: start,
            kind: FormulaParseErrorKind::Lexical(ch),
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, kind: FormulaParseErrorKind) -> FormulaParseError {
        FormulaParseError {
            pos: self.pos(),
            kind,
        }
    }

    fn unexpected(&self) -> FormulaParseError {
        match self.peek() {
            Some(Tok::RParen) => self.error(FormulaParseErrorKind::Unbalanced),
            Some(t) => self.error(FormulaParseErrorKind::Unexpected(t.text())),
            None => self.error(FormulaParseErrorKind::UnexpectedEnd),
        }
    }

    fn iff(&mut self) -> Result<Formula, FormulaParseError> {
        let mut left = self.implication()?;
        while self.eat(&Tok::Iff) {
            let right = self.implication()?;
            left = super::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, FormulaParseError> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let right = self.implication()?;
            return Ok(super::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaParseError> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let right = self.conjunction()?;
            left = super::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaParseError> {
        let mut left = self.unary()?;
        while self.eat(&Tok::And) {
            let right = self.unary()?;
            left = super::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, FormulaParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(super::not(self.unary()?))
            }
            Some(Tok::ForAll | Tok::Exists) => {
                let start = self.pos();
                let universal = self.bump() == Some(Tok::ForAll);
                let dangling = FormulaParseError {
                    pos: start,
                    kind: FormulaParseErrorKind::DanglingQuantifier,
                };
                let Some(Tok::Ident(var)) = self.peek().cloned() else {
                    return Err(dangling);
                };
                self.at += 1;
                if matches!(self.peek(), None | Some(Tok::RParen)) {
                    return Err(dangling);
                }
                let body = self.iff()?;
                Ok(if universal {
                    super::forall(&var, body)
                } else {
                    super::exists(&var, body)
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaParseError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.at += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.at += 1;
                Ok(Formula::False)
            }
            Some(Tok::LParen) => {
                let open = self.pos();
                self.at += 1;
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    if self.peek().is_none() {
                        return Err(FormulaParseError {
                            pos: open,
                            kind: FormulaParseErrorKind::Unbalanced,
                        });
                    }
                    return Err(self.unexpected());
                }
                Ok(inner)
            }
            Some(Tok::Ident(a)) => {
                self.at += 1;
                let rel = match self.peek() {
                    Some(Tok::In(tag)) => Some(*tag),
                    Some(Tok::Eq) => None,
                    _ => return Err(self.unexpected()),
                };
                self.at += 1;
                let Some(Tok::Ident(b)) = self.peek().cloned() else {
                    return Err(self.unexpected());
                };
                self.at += 1;
                Ok(match rel {
                    Some(tag) => Formula::Member(tag, a, b),
                    None => Formula::Eq(a, b),
                })
            }
            _ => Err(self.unexpected()),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let f = p.iff()?;
    if p.peek().is_some() {
        return Err(p.unexpected());
    }
    Ok(f)
}
