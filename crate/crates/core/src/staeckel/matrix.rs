use std::collections::HashMap;

use crate::error::{Error, EvalError, Result};
use crate::expr::{Expr, Parser, Tape};
use crate::sampling::{sample_max_with, Domain};

pub const DEFAULT_DET_EPS: f64 = 1e-10;
/// Laplace expansion is factorial in `n`.
pub const MAX_DIM: usize = 6;

/// `n × n` matrix whose row `i` depends on `x_i` only.
#[derive(Debug, Clone, PartialEq)]
pub struct StaeckelMatrix {
    entries: Vec<Vec<Expr>>,
}

impl StaeckelMatrix {
    /// Validates shape and row-locality.
    pub fn new(entries: Vec<Vec<Expr>>) -> Result<Self> {
        let m = Self::new_unchecked(entries)?;
        if let Some((row, col, var)) = m.row_locality_violation() {
            return Err(Error::RowLocality { row, col, var });
        }
        Ok(m)
    }

    /// Checks only the shape. Row-locality is re-checked by every
    /// verification entry point, so a matrix built this way is still caught
    /// before any bracket or commutator is formed.
    pub fn new_unchecked(entries: Vec<Vec<Expr>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::DimensionOutOfRange {
                n,
                min: 1,
                max: MAX_DIM,
            });
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    n,
                });
            }
        }
        Ok(Self { entries })
    }

    /// Parses row-major DSL strings. Row `i` may also use `t` for `x_{i+1}`.
    pub fn parse(rows: &[&[&str]]) -> Result<Self> {
        let n = rows.len();
        let entries = rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let p = Parser::new(n).alias("t", i);
                row.iter().map(|s| p.parse(s)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                    .collect()
            })
            .collect();
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Expr>] {
        &self.entries
    }

    /// First `(row, col, var)` whose entry references a foreign variable.
    pub fn row_locality_violation(&self) -> Option<(usize, usize, usize)> {
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Some(&k) = e.variables().iter().find(|&&k| k != i) {
                    return Some((i, j, k));
                }
            }
        }
        None
    }

    pub fn check_row_locality(&self) -> Result<()> {
        match self.row_locality_violation() {
            Some((row, col, var)) => Err(Error::RowLocality { row, col, var }),
            None => Ok(()),
        }
    }

    /// Numeric matrix at `x`.
    pub fn evaluate(&self, x: &[f64]) -> std::result::Result<Vec<Vec<f64>>, EvalError> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.eval(x)).collect())
            .collect()
    }

    /// Requires `|det S| ≥ eps` at every sample point of `domain`.
    pub fn check_nondegenerate(&self, domain: &Domain, eps: f64) -> Result<()> {
        let det = Tape::compile(&self.determinant());
        // smallest |det| found by maximizing its reciprocal
        let m = sample_max_with(domain, Vec::new, |buf, x| {
            let d = det.eval_with(x, buf)?;
            Ok(if d == 0.0 { f64::MAX } else { 1.0 / d.abs() })
        })?;
        if m.max_abs * eps > 1.0 {
            return Err(Error::DegenerateMatrix {
                det: 1.0 / m.max_abs,
                point: m.argmax,
            });
        }
        Ok(())
    }

    /// `φ = det S` by Laplace expansion.
    pub fn determinant(&self) -> Expr {
        let n = self.dim();
        Minors::new(self).det(full_mask(n), full_mask(n))
    }

    /// `Δ_αi`, the entry of the adjugate with `S·adj(S) = φ·I`, i.e. the
    /// signed minor of `S` obtained by deleting row `i` and column `α`.
    /// It does not involve `x_i`.
    pub fn cofactor(&self, alpha: usize, i: usize) -> Expr {
        let n = self.dim();
        let minor = Minors::new(self).det(full_mask(n) & !(1 << i), full_mask(n) & !(1 << alpha));
        if (alpha + i) % 2 == 1 {
            minor.neg()
        } else {
            minor
        }
    }

    /// Determinant and all cofactors, sharing one minor cache.
    pub fn adjugate(&self) -> Adjugate {
        let n = self.dim();
        let mut minors = Minors::new(self);
        let phi = minors.det(full_mask(n), full_mask(n));
        let delta = (0..n)
            .map(|alpha| {
                (0..n)
                    .map(|i| {
                        let m = minors.det(full_mask(n) & !(1 << i), full_mask(n) & !(1 << alpha));
                        if (alpha + i) % 2 == 1 {
                            m.neg()
                        } else {
                            m
                        }
                    })
                    .collect()
            })
            .collect();
        Adjugate { phi, delta }
    }
}

/// `φ = det S` and `Δ_αi` with `Σ_α S_jα Δ_αi = φ δ_ji`.
#[derive(Debug, Clone)]
pub struct Adjugate {
    pub phi: Expr,
    /// `delta[α][i] = Δ_αi`.
    pub delta: Vec<Vec<Expr>>,
}

impl Adjugate {
    pub fn dim(&self) -> usize {
        self.delta.len()
    }

    /// `H^{ii}_(α) = Δ_αi / φ`.
    pub fn inverse_entry(&self, alpha: usize, i: usize) -> Expr {
        Expr::quotient(self.delta[alpha][i].clone(), self.phi.clone())
    }
}

fn full_mask(n: usize) -> u32 {
    (1u32 << n) - 1
}

struct Minors<'a> {
    s: &'a StaeckelMatrix,
    memo: HashMap<(u32, u32), Expr>,
}

impl<'a> Minors<'a> {
    fn new(s: &'a StaeckelMatrix) -> Self {
        Self {
            s,
            memo: HashMap::new(),
        }
    }

    /// Determinant of the submatrix on `rows × cols` (equal popcounts),
    /// expanded along its first row.
    fn det(&mut self, rows: u32, cols: u32) -> Expr {
        if rows == 0 {
            return Expr::one();
        }
        if let Some(e) = self.memo.get(&(rows, cols)) {
            return e.clone();
        }
        let r = rows.trailing_zeros() as usize;
        let mut terms = Vec::new();
        let mut position = 0;
        for c in 0..self.s.dim() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = self.s.entry(r, c).clone();
            if !entry.is_zero() {
                let sub = self.det(rows & !(1 << r), cols & !(1 << c));
                if !sub.is_zero() {
                    let sign = if position % 2 == 0 { 1.0 } else { -1.0 };
                    terms.push(Expr::product([Expr::constant(sign), entry, sub]));
                }
            }
            position += 1;
        }
        let e = Expr::sum(terms);
        self.memo.insert((rows, cols), e.clone());
        e
    }
}
