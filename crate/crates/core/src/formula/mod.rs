//! First-order formulas over `{∈₁, ∈₂, =}`.
//!
//! Terms are variables only. Text syntax:
//!
//! ```text
//! forall x exists y (x in1 y & !y in2 x) -> x = x
//! ```
//!
//! Precedence from tightest: `!`, `&`, `|`, `->` (right associative), `<->`. Quantifier bodies
//! extend as far right as possible.

mod eval;
pub mod macros;
mod parse;
mod schema;

pub use eval::{evaluate, Assignment, EvalError, Evaluator};
pub use parse::{parse_formula, FormulaParseError, FormulaParseErrorKind};
pub use schema::{
    instantiate_bounded_replacement, instantiate_replacement, instantiate_separation, SchemaError,
};

use std::collections::BTreeSet;
use std::fmt;

use crate::structure::Tag;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// `Member(tag, a, b)` is `a ∈_tag b`.
    Member(Tag, String, String),
    Eq(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

pub fn member(tag: Tag, a: &str, b: &str) -> Formula {
    Formula::Member(tag, a.to_owned(), b.to_owned())
}

pub fn eq(a: &str, b: &str) -> Formula {
    Formula::Eq(a.to_owned(), b.to_owned())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    Formula::Iff(Box::new(a), Box::new(b))
}

pub fn forall(v: &str, body: Formula) -> Formula {
    Formula::ForAll(v.to_owned(), Box::new(body))
}

pub fn exists(v: &str, body: Formula) -> Formula {
    Formula::Exists(v.to_owned(), Box::new(body))
}

/// `∀v₁ … ∀vₖ body`.
pub fn forall_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
    vars.iter().rev().fold(body, |acc, v| forall(v.as_ref(), acc))
}

/// Conjunction of all items, `true` when empty.
pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
    items.into_iter().reduce(and).unwrap_or(Formula::True)
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !parse::is_keyword(s)
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        let mut see = |v: &'a str, bound: &Vec<&'a str>| {
            if !bound.contains(&v) {
                out.insert(v.to_owned());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Member(_, a, b) | Formula::Eq(a, b) => {
                see(a, bound);
                see(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                bound.push(v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.to_owned());
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Member(_, a, b) | Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(x) => x.visit_vars(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                f(v);
                body.visit_vars(f);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Member(..) | Formula::Eq(..) => 1,
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Replaces free occurrences of `from` by `to`. `to` must not be bound anywhere in `self`,
    /// otherwise the result may capture it.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        let r = |v: &String| if v == from { to.to_owned() } else { v.clone() };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Member(t, a, b) => Formula::Member(*t, r(a), r(b)),
            Formula::Eq(a, b) => Formula::Eq(r(a), r(b)),
            Formula::Not(f) => not(f.rename_free(from, to)),
            Formula::And(a, b) => and(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Or(a, b) => or(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Implies(a, b) => implies(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Iff(a, b) => iff(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::ForAll(v, body) if v == from => self.clone_with_body(body.as_ref().clone()),
            Formula::Exists(v, body) if v == from => self.clone_with_body(body.as_ref().clone()),
            Formula::ForAll(v, body) => forall(v, body.rename_free(from, to)),
            Formula::Exists(v, body) => exists(v, body.rename_free(from, to)),
        }
    }

    fn clone_with_body(&self, body: Formula) -> Formula {
        match self {
            Formula::ForAll(v, _) => forall(v, body),
            Formula::Exists(v, _) => exists(v, body),
            _ => unreachable!("only called on quantifiers"),
        }
    }

    fn is_quantifier(&self) -> bool {
        matches!(self, Formula::ForAll(..) | Formula::Exists(..))
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // A bare quantifier would swallow whatever follows it.
        if self.is_quantifier() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Canonical printer: binary connectives fully parenthesized. `parse_formula` inverts it.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula| {
            f.write_str("(")?;
            a.fmt_operand(f)?;
            write!(f, " {op} ")?;
            b.fmt_operand(f)?;
            f.write_str(")")
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Member(tag, a, b) => write!(f, "{a} in{} {b}", tag.index()),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_operand(f)
            }
            Formula::And(a, b) => binary(f, a, "&", b),
            Formula::Or(a, b) => binary(f, a, "|", b),
            Formula::Implies(a, b) => binary(f, a, "->", b),
            Formula::Iff(a, b) => binary(f, a, "<->", b),
            Formula::ForAll(v, body) => write!(f, "forall {v} {body}"),
            Formula::Exists(v, body) => write!(f, "exists {v} {body}"),
        }
    }
}

/// A name based on `base` that is not in `avoid`.
pub fn fresh_var(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_owned();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !avoid.contains(c))
        .unwrap()
}
