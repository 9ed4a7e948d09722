//! Model checking by exhaustive quantifier expansion.
//!
//! Formulas are compiled to a slot form: every variable occurrence is resolved to an index
//! into one environment array, so evaluation does no name lookups. Membership tests use
//! dense bit matrices when the domain is small enough.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::Formula;
use crate::structure::{DualStructure, ElementId, MembershipRelation};

/// Domains up to this size get a dense `N × N` bit matrix per relation.
const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable `{0}` is free but unassigned")]
    UnboundVariable(String),
    #[error("variable `{var}` is assigned {id}, outside a domain of size {size}")]
    OutOfRange { var: String, id: ElementId, size: usize },
    #[error("malformed assignment `{0}`")]
    Malformed(String),
}

/// Values for free variables. Text form `x=0,y=3`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, ElementId>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, id: ElementId) -> Self {
        self.insert(var, id);
        self
    }

    pub fn insert(&mut self, var: &str, id: ElementId) {
        self.0.insert(var.to_owned(), id);
    }

    pub fn get(&self, var: &str) -> Option<ElementId> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ElementId)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl FromIterator<(String, ElementId)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (String, ElementId)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl FromStr for Assignment {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Assignment::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || EvalError::Malformed(part.to_owned());
            let (var, val) = part.split_once('=').ok_or_else(bad)?;
            let var = var.trim();
            if !super::is_identifier(var) {
                return Err(bad());
            }
            out.insert(var, val.trim().parse().map_err(|_| bad())?);
        }
        Ok(out)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Mem(usize, usize, usize),
    Eq(usize, usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    All(usize, Box<Node>),
    Ex(usize, Box<Node>),
}

fn compile(f: &Formula, scope: &mut Vec<(String, usize)>, next: &mut usize) -> Result<Node, EvalError> {
    let slot = |v: &str, scope: &Vec<(String, usize)>| {
        scope
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|(_, s)| *s)
            .ok_or_else(|| EvalError::UnboundVariable(v.to_owned()))
    };
    let mut sub = |f: &Formula, scope: &mut Vec<(String, usize)>| compile(f, scope, next).map(Box::new);
    Ok(match f {
        Formula::True => Node::Const(true),
        Formula::False => Node::Const(false),
        Formula::Member(tag, a, b) => {
            Node::Mem(usize::from(tag.index() - 1), slot(a, scope)?, slot(b, scope)?)
        }
        Formula::Eq(a, b) => Node::Eq(slot(a, scope)?, slot(b, scope)?),
        Formula::Not(x) => Node::Not(sub(x, scope)?),
        Formula::And(a, b) => Node::And(sub(a, scope)?, sub(b, scope)?),
        Formula::Or(a, b) => Node::Or(sub(a, scope)?, sub(b, scope)?),
        Formula::Implies(a, b) => Node::Implies(sub(a, scope)?, sub(b, scope)?),
        Formula::Iff(a, b) => Node::Iff(sub(a, scope)?, sub(b, scope)?),
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let s = *next;
            *next += 1;
            scope.push((v.clone(), s));
            let body = compile(body, scope, next).map(Box::new);
            scope.pop();
            let body = body?;
            if matches!(f, Formula::ForAll(..)) {
                Node::All(s, body)
            } else {
                Node::Ex(s, body)
            }
        }
    })
}

/// A formula compiled against a fixed list of free variables.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    node: Node,
    arity: usize,
    slots: usize,
}

impl CompiledFormula {
    pub fn arity(&self) -> usize {
        self.arity
    }
}

enum Membership<'s> {
    Dense([Vec<u64>; 2]),
    Sparse([&'s MembershipRelation; 2]),
}

pub struct Evaluator<'s> {
    n: usize,
    membership: Membership<'s>,
}

impl<'s> Evaluator<'s> {
    pub fn new(s: &'s DualStructure) -> Self {
        let n = s.domain_size();
        let membership = if n <= DENSE_LIMIT {
            let matrix = |r: &MembershipRelation| {
                let mut bits = vec![0u64; (n * n).div_ceil(64)];
                for (child, parent) in r.edges() {
                    let i = parent * n + child;
                    bits[i / 64] |= 1 << (i % 64);
                }
                bits
            };
            Membership::Dense([matrix(s.e1()), matrix(s.e2())])
        } else {
            Membership::Sparse([s.e1(), s.e2()])
        };
        Self { n, membership }
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    #[inline]
    fn mem(&self, rel: usize, a: usize, b: usize) -> bool {
        match &self.membership {
            Membership::Dense(m) => {
                let i = b * self.n + a;
                m[rel][i / 64] >> (i % 64) & 1 == 1
            }
            Membership::Sparse(r) => r[rel].contains(a, b),
        }
    }

    fn eval(&self, node: &Node, env: &mut [usize]) -> bool {
        match node {
            Node::Const(b) => *b,
            Node::Mem(r, a, b) => self.mem(*r, env[*a], env[*b]),
            Node::Eq(a, b) => env[*a] == env[*b],
            Node::Not(x) => !self.eval(x, env),
            Node::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Node::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Node::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Node::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Node::All(s, body) => (0..self.n).all(|v| {
                env[*s] = v;
                self.eval(body, env)
            }),
            Node::Ex(s, body) => (0..self.n).any(|v| {
                env[*s] = v;
                self.eval(body, env)
            }),
        }
    }

    /// Compiles `f` with `free[i]` bound to argument position `i`.
    pub fn compile<S: AsRef<str>>(&self, f: &Formula, free: &[S]) -> Result<CompiledFormula, EvalError> {
        let mut scope: Vec<(String, usize)> = free
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_ref().to_owned(), i))
            .collect();
        let mut next = free.len();
        let node = compile(f, &mut scope, &mut next)?;
        Ok(CompiledFormula {
            node,
            arity: free.len(),
            slots: next,
        })
    }

    /// Evaluates with `args[i]` as the value of free position `i`.
    pub fn run(&self, c: &CompiledFormula, args: &[ElementId]) -> bool {
        assert_eq!(args.len(), c.arity, "argument count");
        let mut env = vec![0; c.slots.max(1)];
        env[..args.len()].copy_from_slice(args);
        self.eval(&c.node, &mut env)
    }

    pub fn evaluate(&self, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
        let free: Vec<String> = f.free_vars().into_iter().collect();
        let mut args = Vec::with_capacity(free.len());
        for v in &free {
            let id = asg.get(v).ok_or_else(|| EvalError::UnboundVariable(v.clone()))?;
            args.push(id);
        }
        for (var, id) in asg.iter() {
            if id >= self.n {
                return Err(EvalError::OutOfRange {
                    var: var.to_owned(),
                    id,
                    size: self.n,
                });
            }
        }
        let c = self.compile(f, &free)?;
        Ok(self.run(&c, &args))
    }

    /// For a sentence `∀v₁ … ∀vₖ body`, the lexicographically first values of the leading
    /// universal variables that make `body` false. `None` when the sentence holds.
    pub fn counterexample(&self, f: &Formula) -> Result<Option<Assignment>, EvalError> {
        let mut prefix = Vec::new();
        let mut body = f;
        while let Formula::ForAll(v, inner) = body {
            prefix.push(v.clone());
            body = inner;
        }
        let c = self.compile(body, &prefix)?;
        if prefix.is_empty() {
            return Ok((!self.run(&c, &[])).then(Assignment::new));
        }
        if self.n == 0 {
            return Ok(None);
        }
        let mut args = vec![0; prefix.len()];
        loop {
            if !self.run(&c, &args) {
                // Later binders shadow earlier ones with the same name.
                let mut asg = Assignment::new();
                for (v, a) in prefix.iter().zip(&args) {
                    asg.insert(v, *a);
                }
                return Ok(Some(asg));
            }
            let mut i = args.len();
            loop {
                if i == 0 {
                    return Ok(None);
                }
                i -= 1;
                args[i] += 1;
                if args[i] < self.n {
                    break;
                }
                args[i] = 0;
            }
        }
    }
}

pub fn evaluate(s: &DualStructure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    Evaluator::new(s).evaluate(f, asg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::structure::build_v_universe;

    fn v(n: usize) -> DualStructure {
        build_v_universe(n).unwrap()
    }

    fn holds(s: &DualStructure, f: &str) -> bool {
        evaluate(s, &parse_formula(f).unwrap(), &Assignment::new()).unwrap()
    }

    #[test]
    fn empty_set_exists() {
        assert!(holds(&v(3), "exists x forall y !y in1 x"));
        assert!(holds(&v(3), "exists x forall y !y in2 x"));
    }

    #[test]
    fn extensionality_sentence_on_v3() {
        let ext = "forall x forall y ((forall z (z in1 x <-> z in1 y)) -> x = y)";
        assert!(holds(&v(3), ext));
    }

    #[test]
    fn free_variables_need_values() {
        let s = v(2);
        let f = parse_formula("x in1 y").unwrap();
        assert_eq!(
            evaluate(&s, &f, &Assignment::new()),
            Err(EvalError::UnboundVariable("x".into()))
        );
        let a: Assignment = "x=0,y=1".parse().unwrap();
        assert_eq!(evaluate(&s, &f, &a), Ok(true));
        let a: Assignment = "x=0,y=5".parse().unwrap();
        assert!(matches!(evaluate(&s, &f, &a), Err(EvalError::OutOfRange { .. })));
    }

    #[test]
    fn assignment_text_round_trip() {
        let a: Assignment = "y=3, x=0".parse().unwrap();
        assert_eq!(a.to_string(), "x=0,y=3");
        assert!("x".parse::<Assignment>().is_err());
        assert!("in1=2".parse::<Assignment>().is_err());
        assert_eq!("".parse::<Assignment>().unwrap(), Assignment::new());
    }

    #[test]
    fn shadowing() {
        let s = v(2);
        let f = parse_formula("forall x (x = x & exists x x in1 y)").unwrap();
        assert!(evaluate(&s, &f, &Assignment::new().with("y", 1)).unwrap());
        assert!(!evaluate(&s, &f, &Assignment::new().with("y", 0)).unwrap());
    }

    #[test]
    fn counterexample_is_first_in_order() {
        let s = v(2);
        let f = parse_formula("forall x forall y (x in1 y | y in1 x | x = y)").unwrap();
        assert_eq!(Evaluator::new(&s).counterexample(&f).unwrap(), None);
        let g = parse_formula("forall x forall y !x in1 y").unwrap();
        let cx = Evaluator::new(&s).counterexample(&g).unwrap().unwrap();
        assert_eq!(cx.to_string(), "x=0,y=1");
    }
}
