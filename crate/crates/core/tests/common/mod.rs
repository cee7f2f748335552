//! Expression generators shared by the property tests and the acceptance run.

use proptest::prelude::*;
use staeckel::{Expr, Func, Node};

fn constant() -> impl Strategy<Value = f64> {
    (-300i32..=300).prop_map(|k| k as f64 / 100.0)
}

/// Expressions of depth ≤ 5 in two variables that are smooth on `[-1, 1]²`:
/// quotients, negative powers, `log` and `sqrt` only see arguments bounded
/// away from zero.
pub fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::var(0)),
        Just(Expr::var(1)),
        constant().prop_map(Expr::constant),
    ];
    leaf.prop_recursive(5, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Sum(vec![a, b]))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Product(vec![a, b]))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                let den = Expr::new(Node::Sum(vec![
                    Expr::constant(1.5),
                    Expr::unary(Func::Sin, b),
                ]));
                Expr::new(Node::Quotient(a, den))
            }),
            (inner.clone(), 0i32..=3).prop_map(|(a, k)| Expr::new(Node::IntPow(a, k))),
            (inner.clone(), 1i32..=2).prop_map(|(a, k)| {
                let base = Expr::new(Node::Sum(vec![
                    Expr::constant(2.0),
                    Expr::unary(Func::Cos, a),
                ]));
                Expr::new(Node::IntPow(base, -k))
            }),
            inner.clone().prop_map(|a| Expr::unary(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::unary(Func::Cos, a)),
            inner
                .clone()
                .prop_map(|a| Expr::unary(Func::Exp, Expr::unary(Func::Sin, a))),
            inner.clone().prop_map(|a| {
                let arg = Expr::new(Node::Sum(vec![Expr::one(), Expr::new(Node::IntPow(a, 2))]));
                Expr::unary(Func::Log, arg)
            }),
            inner.prop_map(|a| {
                let arg = Expr::new(Node::Sum(vec![Expr::one(), Expr::new(Node::IntPow(a, 2))]));
                Expr::unary(Func::Sqrt, arg)
            }),
        ]
    })
}

/// Anything the printer must handle: negative constants, explicit negation,
/// unrestricted quotients and powers. Evaluation may fail at some points.
pub fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(Expr::var),
        constant().prop_map(Expr::constant),
        prop_oneof![Just(1e-7), Just(-2.5e20), Just(123456.0)].prop_map(Expr::constant),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(|xs| Expr::new(Node::Sum(xs))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|xs| Expr::new(Node::Product(xs))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Quotient(a, b))),
            (inner.clone(), -3i32..=4).prop_map(|(a, k)| Expr::new(Node::IntPow(a, k))),
            inner.clone().prop_map(|a| a.neg()),
            (inner, prop::sample::select(Func::ALL.to_vec())).prop_map(|(a, f)| Expr::unary(f, a)),
        ]
    })
}
