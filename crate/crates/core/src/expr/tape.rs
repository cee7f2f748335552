use std::collections::HashMap;
use std::sync::Arc;

use twofloat::TwoFloat;

use super::{Expr, Func, InverseMap, Node, NodeKey};
use crate::error::EvalError;

#[derive(Debug)]
enum Op {
    Const(f64),
    Var(usize),
    Sum(Vec<u32>),
    Product(Vec<u32>),
    Div(u32, u32),
    Pow(u32, i32),
    Unary(Func, u32),
    Inverse(Arc<InverseMap>, u32),
}

/// Straight-line program for an expression DAG: every distinct node becomes
/// one instruction, in dependency order.
#[derive(Debug)]
pub struct Tape {
    ops: Vec<Op>,
}

impl Tape {
    pub fn compile(e: &Expr) -> Tape {
        let mut ops = Vec::new();
        let mut slots = HashMap::new();
        emit(e, &mut ops, &mut slots);
        Tape { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let mut buf = Vec::with_capacity(self.ops.len());
        self.eval_with(point, &mut buf)
    }

    /// Evaluates reusing `buf` as scratch space.
    pub fn eval_with(&self, point: &[f64], buf: &mut Vec<f64>) -> Result<f64, EvalError> {
        buf.clear();
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => *c,
                Op::Var(k) => *point.get(*k).ok_or(EvalError::MissingVariable {
                    index: *k,
                    len: point.len(),
                })?,
                Op::Sum(xs) => xs.iter().fold(0.0, |acc, &i| acc + buf[i as usize]),
                Op::Product(xs) => {
                    let mut acc = buf[xs[0] as usize];
                    for &i in &xs[1..] {
                        acc *= buf[i as usize];
                    }
                    acc
                }
                Op::Div(a, b) => {
                    let d = buf[*b as usize];
                    if d == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    buf[*a as usize] / d
                }
                Op::Pow(a, k) => {
                    let x = buf[*a as usize];
                    if x == 0.0 && *k < 0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    x.powi(*k)
                }
                Op::Unary(f, a) => f.apply(buf[*a as usize])?,
                Op::Inverse(m, a) => m.invert(buf[*a as usize])?,
            };
            buf.push(v);
        }
        Ok(*buf.last().expect("tape is never empty"))
    }
    /// Evaluates in double-double arithmetic and rounds the result to `f64`.
    ///
    /// Sums, products, quotients and integer powers carry about 106 bits.
    /// Elementary functions and inverse maps are applied to the leading
    /// part with a first-order correction, so their relative error stays at
    /// the `f64` level. Used where large intermediate terms cancel.
    pub fn eval_extended_with(
        &self,
        point: &[f64],
        buf: &mut Vec<TwoFloat>,
    ) -> Result<f64, EvalError> {
        buf.clear();
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => TwoFloat::from(*c),
                Op::Var(k) => TwoFloat::from(*point.get(*k).ok_or(EvalError::MissingVariable {
                    index: *k,
                    len: point.len(),
                })?),
                Op::Sum(xs) => xs
                    .iter()
                    .fold(TwoFloat::from(0.0), |acc, &i| acc + buf[i as usize]),
                Op::Product(xs) => {
                    let mut acc = buf[xs[0] as usize];
                    for &i in &xs[1..] {
                        acc *= buf[i as usize];
                    }
                    acc
                }
                Op::Div(a, b) => {
                    let d = buf[*b as usize];
                    if d.hi() == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    dd_div(buf[*a as usize], d)
                }
                Op::Pow(a, k) => {
                    let x = buf[*a as usize];
                    if x.hi() == 0.0 {
                        if *k < 0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        TwoFloat::from(0.0)
                    } else if *k < 0 {
                        dd_div(TwoFloat::from(1.0), x.powi(-k))
                    } else {
                        x.powi(*k)
                    }
                }
                Op::Unary(f, a) => {
                    let x = buf[*a as usize];
                    let (hi, lo) = (x.hi(), x.lo());
                    let y = f.apply(hi)?;
                    let slope = match f {
                        Func::Sin => hi.cos(),
                        Func::Cos => -hi.sin(),
                        Func::Exp => y,
                        Func::Log => 1.0 / hi,
                        Func::Sqrt if y == 0.0 => 0.0,
                        Func::Sqrt => 0.5 / y,
                    };
                    TwoFloat::new_add(y, slope * lo)
                }
                Op::Inverse(m, a) => TwoFloat::from(m.invert(buf[*a as usize].hi())?),
            };
            buf.push(v);
        }
        let out = buf.last().expect("tape is never empty");
        Ok(out.hi() + out.lo())
    }
}

/// Double-double quotient by long division with two correction steps.
/// `TwoFloat`'s own division drops the low part of `1 − b·(1/b)`.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

fn emit(e: &Expr, ops: &mut Vec<Op>, slots: &mut HashMap<NodeKey, u32>) -> u32 {
    if let Some(&s) = slots.get(&e.key()) {
        return s;
    }
    let op = match e.node() {
        Node::Const(c) => Op::Const(*c),
        Node::Var(k) => Op::Var(*k),
        Node::Sum(xs) if xs.is_empty() => Op::Const(0.0),
        Node::Product(xs) if xs.is_empty() => Op::Const(1.0),
        Node::Sum(xs) => Op::Sum(xs.iter().map(|x| emit(x, ops, slots)).collect()),
        Node::Product(xs) => Op::Product(xs.iter().map(|x| emit(x, ops, slots)).collect()),
        Node::Quotient(a, b) => {
            let a = emit(a, ops, slots);
            let b = emit(b, ops, slots);
            Op::Div(a, b)
        }
        Node::IntPow(b, k) => Op::Pow(emit(b, ops, slots), *k),
        Node::Unary(f, a) => Op::Unary(*f, emit(a, ops, slots)),
        Node::Inverse(m, a) => Op::Inverse(m.clone(), emit(a, ops, slots)),
    };
    ops.push(op);
    let slot = (ops.len() - 1) as u32;
    slots.insert(e.key(), slot);
    slot
}
