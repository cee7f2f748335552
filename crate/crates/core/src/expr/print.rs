//! DSL printer. Output re-parses to a structurally equivalent expression, so
//! evaluation survives a print/parse round trip. `Inverse` nodes print as
//! `inverse(...)`, which is not part of the DSL.

use std::fmt;

use super::{Expr, Node};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const NEG_CONST: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) if c.is_sign_negative() => NEG_CONST,
        Node::Sum(xs) if xs.len() > 1 => SUM,
        Node::Product(xs) if xs.len() > 1 => PRODUCT,
        Node::Quotient(..) => PRODUCT,
        Node::IntPow(..) => POWER,
        _ => ATOM,
    }
}

fn fmt_const(c: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let a = c.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        write!(f, "{c:e}")
    } else {
        write!(f, "{c}")
    }
}

fn wrapped(e: &Expr, parens: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn leading_negative(e: &Expr) -> Option<(f64, &[Expr])> {
    match e.node() {
        Node::Product(xs) if xs.len() > 1 => match xs[0].node() {
            Node::Const(c) if c.is_sign_negative() => Some((*c, &xs[1..])),
            _ => None,
        },
        _ => None,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => fmt_const(*c, f),
            Node::Var(k) => write!(f, "x{}", k + 1),
            Node::Sum(xs) if xs.is_empty() => write!(f, "0"),
            Node::Product(xs) if xs.is_empty() => write!(f, "1"),
            Node::Sum(xs) => {
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        if let Some(c) = x.as_const().filter(|c| c.is_sign_negative()) {
                            f.write_str(" - ")?;
                            fmt_const(-c, f)?;
                            continue;
                        }
                        if let Some((c, rest)) = leading_negative(x) {
                            f.write_str(" - ")?;
                            if c == -1.0 && rest.len() == 1 {
                                wrapped(&rest[0], precedence(&rest[0]) <= SUM, f)?;
                                continue;
                            }
                            if c != -1.0 {
                                fmt_const(-c, f)?;
                                f.write_str("*")?;
                            }
                            for (j, r) in rest.iter().enumerate() {
                                if j > 0 {
                                    f.write_str("*")?;
                                }
                                wrapped(
                                    r,
                                    precedence(r) <= PRODUCT || precedence(r) == NEG_CONST,
                                    f,
                                )?;
                            }
                            continue;
                        }
                        f.write_str(" + ")?;
                    }
                    wrapped(x, precedence(x) <= SUM, f)?;
                }
                Ok(())
            }
            Node::Product(xs) => {
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    let p = precedence(x);
                    wrapped(x, p <= PRODUCT || (k > 0 && p == NEG_CONST), f)?;
                }
                Ok(())
            }
            Node::Quotient(a, b) => {
                wrapped(a, precedence(a) <= SUM, f)?;
                f.write_str("/")?;
                wrapped(b, precedence(b) <= NEG_CONST, f)
            }
            Node::IntPow(b, k) => {
                wrapped(b, precedence(b) <= POWER, f)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Unary(func, a) => write!(f, "{}({a})", func.name()),
            Node::Inverse(m, a) => write!(f, "inverse[{}]({a})", m.forward()),
        }
    }
}
