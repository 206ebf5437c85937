//! Lazily evaluated real expressions with per-precision memoization.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;

use super::interval::FixedInterval;
use super::tower::{Elem, Tower};

#[derive(Debug)]
enum Op {
    Rational(BigRational),
    Algebraic(Elem),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Neg(Expr),
    Sqrt(Expr),
}

#[derive(Debug)]
struct Node {
    op: Op,
    memo: Mutex<HashMap<u32, FixedInterval>>,
}

/// A node of an expression DAG. Shared subexpressions are evaluated once
/// per precision level.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.op {
            Op::Rational(q) => write!(f, "{q}"),
            Op::Algebraic(e) => write!(f, "[{e}]"),
            Op::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Op::Sub(a, b) => write!(f, "({a:?} - {b:?})"),
            Op::Mul(a, b) => write!(f, "({a:?} * {b:?})"),
            Op::Neg(a) => write!(f, "-{a:?}"),
            Op::Sqrt(a) => write!(f, "sqrt({a:?})"),
        }
    }
}

impl Expr {
    fn node(op: Op) -> Expr {
        Expr(Arc::new(Node { op, memo: Mutex::new(HashMap::new()) }))
    }

    pub fn rational(q: BigRational) -> Expr {
        Expr::node(Op::Rational(q))
    }

    pub fn algebraic(e: Elem) -> Expr {
        Expr::node(Op::Algebraic(e))
    }

    pub fn add(&self, other: &Expr) -> Expr {
        Expr::node(Op::Add(self.clone(), other.clone()))
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        Expr::node(Op::Sub(self.clone(), other.clone()))
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        Expr::node(Op::Mul(self.clone(), other.clone()))
    }

    pub fn neg(&self) -> Expr {
        Expr::node(Op::Neg(self.clone()))
    }

    /// Square root; the argument is expected to be positive.
    pub fn sqrt(&self) -> Expr {
        Expr::node(Op::Sqrt(self.clone()))
    }

    pub fn evaluate(&self, bits: u32) -> FixedInterval {
        if let Some(iv) = self.0.memo.lock().expect("memo poisoned").get(&bits) {
            return iv.clone();
        }
        let iv = match &self.0.op {
            Op::Rational(q) => FixedInterval::from_rationals(q, q, bits),
            Op::Algebraic(e) => e.enclose(bits),
            Op::Add(a, b) => a.evaluate(bits).add(&b.evaluate(bits)),
            Op::Sub(a, b) => a.evaluate(bits).sub(&b.evaluate(bits)),
            Op::Mul(a, b) => a.evaluate(bits).mul(&b.evaluate(bits)),
            Op::Neg(a) => a.evaluate(bits).neg(),
            Op::Sqrt(a) => a.evaluate(bits).sqrt(),
        };
        self.0.memo.lock().expect("memo poisoned").insert(bits, iv.clone());
        iv
    }

    /// The exact value when every leaf lives in a common tower and no
    /// square root node is involved.
    pub fn exact(&self) -> Option<Elem> {
        match &self.0.op {
            Op::Rational(q) => Some(Tower::rationals().rational(q.clone())),
            Op::Algebraic(e) => Some(e.clone()),
            Op::Add(a, b) => combine(a, b, |x, y| x + y),
            Op::Sub(a, b) => combine(a, b, |x, y| x - y),
            Op::Mul(a, b) => combine(a, b, |x, y| x * y),
            Op::Neg(a) => a.exact().map(|x| -&x),
            Op::Sqrt(_) => None,
        }
    }
}

fn combine(a: &Expr, b: &Expr, f: impl Fn(&Elem, &Elem) -> Elem) -> Option<Elem> {
    let x = a.exact()?;
    let y = b.exact()?;
    if x.tower().is_prefix_of(y.tower()) || y.tower().is_prefix_of(x.tower()) {
        Some(f(&x, &y))
    } else {
        None
    }
}
