//! A small computer-algebra kernel.
//!
//! Expressions are immutable DAGs behind [`Arc`]: cloning is cheap and
//! repeated sub-expressions produced by differentiation are shared rather
//! than copied. Every transformation (`diff`, `simplify`, `substitute`)
//! memoizes on node identity so sharing survives, and evaluation goes through
//! a compiled [`Tape`] that visits each shared node once.
//!
//! There is no canonical form. Whether an expression vanishes is decided by
//! sampling (see [`crate::sampling`]).

mod diff;
mod parse;
mod print;
mod simplify;
mod tape;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::EvalError;

pub use parse::{parse_expr, Parser};
pub use tape::Tape;

/// Elementary functions allowed in the DSL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn apply(self, x: f64) -> Result<f64, EvalError> {
        match self {
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
            Func::Exp => Ok(x.exp()),
            Func::Log if x <= 0.0 => Err(EvalError::LogDomain(x)),
            Func::Log => Ok(x.ln()),
            Func::Sqrt if x < 0.0 => Err(EvalError::SqrtDomain(x)),
            Func::Sqrt => Ok(x.sqrt()),
        }
    }
}

/// Inverse of a strictly monotone univariate map `f` (written in `Var 0`)
/// restricted to `[lo, hi]`, evaluated by bisection.
#[derive(Debug)]
pub struct InverseMap {
    forward: Expr,
    derivative: Expr,
    tape: Tape,
    lo: f64,
    hi: f64,
    increasing: bool,
}

impl PartialEq for InverseMap {
    fn eq(&self, other: &Self) -> bool {
        self.forward == other.forward && self.lo == other.lo && self.hi == other.hi
    }
}

impl InverseMap {
    /// `forward` must be strictly monotone on `[lo, hi]`; the caller checks
    /// that (see `gallery::rescale`).
    pub fn new(forward: Expr, lo: f64, hi: f64) -> Result<Self, EvalError> {
        let tape = Tape::compile(&forward);
        let a = tape.eval(&[lo])?;
        let b = tape.eval(&[hi])?;
        Ok(Self {
            derivative: forward.diff(0),
            forward,
            tape,
            lo,
            hi,
            increasing: b > a,
        })
    }

    pub fn forward(&self) -> &Expr {
        &self.forward
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Solves `f(t) = y` on the stored interval. Bisection runs until the
    /// bracket cannot be split any further in double precision.
    pub fn invert(&self, y: f64) -> Result<f64, EvalError> {
        let mut buf = Vec::new();
        let fa = self.tape.eval_with(&[self.lo], &mut buf)?;
        let fb = self.tape.eval_with(&[self.hi], &mut buf)?;
        let (ymin, ymax) = if fa <= fb { (fa, fb) } else { (fb, fa) };
        if !(ymin..=ymax).contains(&y) {
            return Err(EvalError::InverseOutOfRange(y));
        }
        let (mut a, mut b) = (self.lo, self.hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = self.tape.eval_with(&[mid], &mut buf)?;
            if (fm < y) == self.increasing {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }
}

/// One node of the expression DAG.
#[derive(Debug, PartialEq)]
pub enum Node {
    Const(f64),
    /// Zero-based coordinate index: `Var(0)` is `x1`.
    Var(usize),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    IntPow(Expr, i32),
    Unary(Func, Expr),
    /// `f⁻¹(arg)`; produced by coordinate rescaling, not by the parser.
    Inverse(Arc<InverseMap>, Expr),
}

/// Shared handle to an expression node.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

pub(crate) type NodeKey = usize;

impl Expr {
    /// Wraps a node without any simplification.
    pub fn new(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn key(&self) -> NodeKey {
        Arc::as_ptr(&self.0) as NodeKey
    }

    pub fn constant(c: f64) -> Self {
        Expr::new(Node::Const(c))
    }

    pub fn zero() -> Self {
        Expr::constant(0.0)
    }

    pub fn one() -> Self {
        Expr::constant(1.0)
    }

    pub fn var(index: usize) -> Self {
        Expr::new(Node::Var(index))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn unary(func: Func, arg: Expr) -> Self {
        simplify::unary(func, arg)
    }

    pub fn sin(self) -> Self {
        Expr::unary(Func::Sin, self)
    }

    pub fn cos(self) -> Self {
        Expr::unary(Func::Cos, self)
    }

    pub fn exp(self) -> Self {
        Expr::unary(Func::Exp, self)
    }

    pub fn ln(self) -> Self {
        Expr::unary(Func::Log, self)
    }

    pub fn sqrt(self) -> Self {
        Expr::unary(Func::Sqrt, self)
    }

    pub fn powi(self, k: i32) -> Self {
        simplify::int_pow(self, k)
    }

    /// Lightly simplifying sum constructor.
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Self {
        simplify::sum(terms.into_iter().collect())
    }

    /// Lightly simplifying product constructor.
    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Self {
        simplify::product(factors.into_iter().collect())
    }

    pub fn quotient(num: Expr, den: Expr) -> Self {
        simplify::quotient(num, den)
    }

    pub fn neg(self) -> Self {
        Expr::product([Expr::constant(-1.0), self])
    }

    pub fn inverse(map: Arc<InverseMap>, arg: Expr) -> Self {
        Expr::new(Node::Inverse(map, arg))
    }

    /// Symbolic partial derivative with respect to `Var(var)`.
    pub fn diff(&self, var: usize) -> Expr {
        diff::Differentiator::new(var).diff(self)
    }

    /// Repeated partial derivative `∂^k/∂x_var^k`.
    pub fn diff_n(&self, var: usize, k: usize) -> Expr {
        let mut d = diff::Differentiator::new(var);
        let mut e = self.clone();
        for _ in 0..k {
            e = d.diff(&e);
        }
        e
    }

    pub fn simplify(&self) -> Expr {
        simplify::Simplifier::default().run(self)
    }

    /// Replaces every `Var(var)` by `replacement`.
    pub fn substitute(&self, var: usize, replacement: &Expr) -> Expr {
        fn go(e: &Expr, var: usize, rep: &Expr, memo: &mut HashMap<NodeKey, Expr>) -> Expr {
            if let Some(hit) = memo.get(&e.key()) {
                return hit.clone();
            }
            let out = match e.node() {
                Node::Const(_) => e.clone(),
                Node::Var(k) if *k == var => rep.clone(),
                Node::Var(_) => e.clone(),
                Node::Sum(xs) => Expr::new(Node::Sum(
                    xs.iter().map(|x| go(x, var, rep, memo)).collect(),
                )),
                Node::Product(xs) => Expr::new(Node::Product(
                    xs.iter().map(|x| go(x, var, rep, memo)).collect(),
                )),
                Node::Quotient(a, b) => {
                    Expr::new(Node::Quotient(go(a, var, rep, memo), go(b, var, rep, memo)))
                }
                Node::IntPow(b, k) => Expr::new(Node::IntPow(go(b, var, rep, memo), *k)),
                Node::Unary(f, a) => Expr::new(Node::Unary(*f, go(a, var, rep, memo))),
                Node::Inverse(m, a) => Expr::new(Node::Inverse(m.clone(), go(a, var, rep, memo))),
            };
            memo.insert(e.key(), out.clone());
            out
        }
        go(self, var, replacement, &mut HashMap::new())
    }

    /// Moves a univariate expression written in `Var(0)` onto `Var(axis)`.
    pub fn on_axis(&self, axis: usize) -> Expr {
        if axis == 0 {
            self.clone()
        } else {
            self.substitute(0, &Expr::var(axis))
        }
    }

    /// Indices of all variables the expression references.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.key()) {
                continue;
            }
            match e.node() {
                Node::Const(_) => {}
                Node::Var(k) => {
                    out.insert(*k);
                }
                Node::Sum(xs) | Node::Product(xs) => stack.extend(xs.iter().cloned()),
                Node::Quotient(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Node::IntPow(a, _) | Node::Unary(_, a) | Node::Inverse(_, a) => {
                    stack.push(a.clone())
                }
            }
        }
        out
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.variables().contains(&var)
    }

    /// Number of distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        Tape::compile(self).len()
    }

    /// One-off evaluation. For repeated evaluation compile a [`Tape`].
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        Tape::compile(self).eval(point)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::constant(c)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum([self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum([self, rhs.neg()])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product([self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::quotient(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
