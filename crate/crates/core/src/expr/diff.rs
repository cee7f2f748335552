use std::collections::HashMap;

use super::{Expr, Func, Node, NodeKey};

/// Differentiates with respect to one variable, memoizing per node so that
/// shared sub-expressions are differentiated once and stay shared.
pub(super) struct Differentiator {
    var: usize,
    memo: HashMap<NodeKey, (Expr, Expr)>,
    constant: HashMap<NodeKey, bool>,
}

impl Differentiator {
    pub(super) fn new(var: usize) -> Self {
        Self {
            var,
            memo: HashMap::new(),
            constant: HashMap::new(),
        }
    }

    fn is_constant(&mut self, e: &Expr) -> bool {
        if let Some(&c) = self.constant.get(&e.key()) {
            return c;
        }
        let c = match e.node() {
            Node::Const(_) => true,
            Node::Var(k) => *k != self.var,
            Node::Sum(xs) | Node::Product(xs) => xs.iter().all(|x| self.is_constant(x)),
            Node::Quotient(a, b) => self.is_constant(a) && self.is_constant(b),
            Node::IntPow(a, _) | Node::Unary(_, a) | Node::Inverse(_, a) => self.is_constant(a),
        };
        self.constant.insert(e.key(), c);
        c
    }

    pub(super) fn diff(&mut self, e: &Expr) -> Expr {
        if self.is_constant(e) {
            return Expr::zero();
        }
        if let Some((_, d)) = self.memo.get(&e.key()) {
            return d.clone();
        }
        let d = match e.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(k) => {
                if *k == self.var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(xs) => Expr::sum(xs.iter().map(|x| self.diff(x)).collect::<Vec<_>>()),
            Node::Product(xs) => {
                let mut terms = Vec::new();
                for (k, x) in xs.iter().enumerate() {
                    if self.is_constant(x) {
                        continue;
                    }
                    let dx = self.diff(x);
                    let mut factors: Vec<Expr> = xs.clone();
                    factors[k] = dx;
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Node::Quotient(u, v) => {
                let du = self.diff(u);
                if self.is_constant(v) {
                    Expr::quotient(du, v.clone())
                } else {
                    let dv = self.diff(v);
                    // u'/v - u v'/v^2
                    let second = Expr::quotient(Expr::product([u.clone(), dv]), v.clone().powi(2));
                    Expr::sum([Expr::quotient(du, v.clone()), second.neg()])
                }
            }
            Node::IntPow(b, k) => {
                let db = self.diff(b);
                Expr::product([Expr::constant(*k as f64), b.clone().powi(k - 1), db])
            }
            Node::Unary(f, a) => {
                let da = self.diff(a);
                let outer = match f {
                    Func::Sin => a.clone().cos(),
                    Func::Cos => a.clone().sin().neg(),
                    Func::Exp => e.clone(),
                    Func::Log => Expr::quotient(Expr::one(), a.clone()),
                    Func::Sqrt => Expr::quotient(Expr::constant(0.5), e.clone()),
                };
                Expr::product([outer, da])
            }
            Node::Inverse(map, a) => {
                // (f^-1)'(y) = 1 / f'(f^-1(y))
                let da = self.diff(a);
                let slope = map.derivative.substitute(0, e);
                Expr::quotient(da, slope)
            }
        };
        self.memo.insert(e.key(), (e.clone(), d.clone()));
        d
    }
}
