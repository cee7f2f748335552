//! Node-local rewrite rules. The smart constructors apply them to a single
//! node; [`Simplifier`] rebuilds a whole DAG bottom-up through them, which
//! makes `simplify` idempotent.
//!
//! Rules: constant folding, removal of additive zeros and multiplicative
//! ones, absorption by a zero factor, flattening of nested sums/products,
//! `x^0`, `x^1`, `(x^a)^b`. Folded constants go last in sums and first in
//! products.

use std::collections::HashMap;

use super::{Expr, Func, Node, NodeKey};

pub(super) fn sum(terms: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(terms.len());
    let mut constant = 0.0;
    let mut folded = 0usize;
    for t in terms {
        match t.node() {
            Node::Const(c) => {
                constant += c;
                folded += 1;
            }
            Node::Sum(inner) => {
                for s in inner {
                    match s.node() {
                        Node::Const(c) => {
                            constant += c;
                            folded += 1;
                        }
                        _ => flat.push(s.clone()),
                    }
                }
            }
            _ => flat.push(t),
        }
    }
    if folded > 0 && constant != 0.0 {
        flat.push(Expr::constant(constant));
    }
    match flat.len() {
        0 => Expr::zero(),
        1 => flat.pop().unwrap(),
        _ => Expr::new(Node::Sum(flat)),
    }
}

pub(super) fn product(factors: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(factors.len());
    let mut constant = 1.0;
    for f in factors {
        match f.node() {
            Node::Const(c) => constant *= c,
            Node::Product(inner) => {
                for g in inner {
                    match g.node() {
                        Node::Const(c) => constant *= c,
                        _ => flat.push(g.clone()),
                    }
                }
            }
            _ => flat.push(f),
        }
    }
    if constant == 0.0 {
        return Expr::zero();
    }
    if flat.is_empty() {
        return Expr::constant(constant);
    }
    if constant != 1.0 {
        flat.insert(0, Expr::constant(constant));
    }
    if flat.len() == 1 {
        return flat.pop().unwrap();
    }
    Expr::new(Node::Product(flat))
}

pub(super) fn quotient(num: Expr, den: Expr) -> Expr {
    if den.is_one() {
        return num;
    }
    match (num.as_const(), den.as_const()) {
        (_, Some(d)) if d == 0.0 => Expr::new(Node::Quotient(num, den)),
        (Some(n), _) if n == 0.0 => Expr::zero(),
        (Some(n), Some(d)) => Expr::constant(n / d),
        _ => Expr::new(Node::Quotient(num, den)),
    }
}

pub(super) fn int_pow(base: Expr, k: i32) -> Expr {
    if k == 0 {
        return Expr::one();
    }
    if k == 1 {
        return base;
    }
    match base.node() {
        Node::Const(c) if *c != 0.0 || k > 0 => {
            let v = c.powi(k);
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
        Node::IntPow(inner, j) => {
            if let Some(m) = j.checked_mul(k) {
                return int_pow(inner.clone(), m);
            }
        }
        _ => {}
    }
    Expr::new(Node::IntPow(base, k))
}

pub(super) fn unary(func: Func, arg: Expr) -> Expr {
    if let Some(c) = arg.as_const() {
        if let Ok(v) = func.apply(c) {
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
    }
    Expr::new(Node::Unary(func, arg))
}

#[derive(Default)]
pub(super) struct Simplifier {
    memo: HashMap<NodeKey, (Expr, Expr)>,
}

impl Simplifier {
    pub(super) fn run(&mut self, e: &Expr) -> Expr {
        if let Some((_, hit)) = self.memo.get(&e.key()) {
            return hit.clone();
        }
        let out = match e.node() {
            Node::Const(_) | Node::Var(_) => e.clone(),
            Node::Sum(xs) => sum(xs.iter().map(|x| self.run(x)).collect()),
            Node::Product(xs) => product(xs.iter().map(|x| self.run(x)).collect()),
            Node::Quotient(a, b) => {
                let (a, b) = (self.run(a), self.run(b));
                quotient(a, b)
            }
            Node::IntPow(b, k) => int_pow(self.run(b), *k),
            Node::Unary(f, a) => unary(*f, self.run(a)),
            Node::Inverse(m, a) => Expr::inverse(m.clone(), self.run(a)),
        };
        self.memo.insert(e.key(), (e.clone(), out.clone()));
        out
    }
}
