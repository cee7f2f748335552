use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::staeckel::{check_axis_functions, StaeckelMatrix};

pub const MIN_STEPS: usize = 16;

/// Separation constants `E_1, …, E_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyVector(Vec<f64>);

impl EnergyVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument(format!("E{} is not finite", k + 1)));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, alpha: usize) -> f64 {
        self.0[alpha]
    }
}

/// `r_α = Σ_j S_αj E_j − V_α`, so that the separated equation reads
/// `ψ'' = r_α ψ` in the variable `x_α`.
pub fn separated_rhs(
    s: &StaeckelMatrix,
    v: &[Expr],
    e: &EnergyVector,
    alpha: usize,
) -> Result<Expr> {
    let n = s.dim();
    check_axis_functions(v, n)?;
    if e.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} energies, got {}",
            e.dim()
        )));
    }
    let terms = (0..n)
        .map(|j| s.entry(alpha, j).clone() * Expr::constant(e.get(j)))
        .chain(std::iter::once(v[alpha].clone().neg()))
        .collect::<Vec<_>>();
    Ok(Expr::sum(terms).simplify())
}

/// `ψ` and `ψ'` at the `steps + 1` uniform nodes of one axis interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSolution {
    pub axis: usize,
    pub lo: f64,
    pub hi: f64,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
}

impl AxisSolution {
    pub fn steps(&self) -> usize {
        self.psi.len() - 1
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.steps() as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.lo + k as f64 * self.step()
    }

    /// Five-point central second difference at node `k`; needs two nodes on
    /// either side.
    pub fn second_difference(&self, k: usize) -> Result<f64> {
        if k < 2 || k + 2 > self.steps() {
            return Err(Error::GridMismatch(format!(
                "node {k} of axis {} is too close to the boundary for the 5-point stencil",
                self.axis + 1
            )));
        }
        let p = &self.psi;
        let h = self.step();
        Ok(
            (-p[k - 2] + 16.0 * p[k - 1] - 30.0 * p[k] + 16.0 * p[k + 1] - p[k + 2])
                / (12.0 * h * h),
        )
    }

    /// Comma-separated `x,psi,dpsi` with a header line.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from("x,psi,dpsi\n");
        for k in 0..self.psi.len() {
            let _ = writeln!(
                out,
                "{:e},{:e},{:e}",
                self.node(k),
                self.psi[k],
                self.dpsi[k]
            );
        }
        out
    }
}

/// Classical fixed-step RK4 for `(ψ, ψ')' = (ψ', r ψ)` on `interval`, with
/// `(ψ, ψ')(lo) = init`. `r` may only reference `x_axis`.
pub fn solve_separated_ode(
    r: &Expr,
    axis: usize,
    interval: (f64, f64),
    init: (f64, f64),
    steps: usize,
) -> Result<AxisSolution> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    if let Some(&k) = r.variables().iter().find(|&&k| k != axis) {
        return Err(Error::InvalidArgument(format!(
            "separated equation for axis {} references x{}",
            axis + 1,
            k + 1
        )));
    }
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidDomain(format!("bad interval [{lo}, {hi}]")));
    }
    let tape = Tape::compile(r);
    let mut point = vec![0.0; axis + 1];
    let mut buf = Vec::new();
    let mut rate = |x: f64| -> Result<f64> {
        point[axis] = x;
        Ok(tape.eval_with(&point, &mut buf)?)
    };
    let h = (hi - lo) / steps as f64;
    let mut psi = Vec::with_capacity(steps + 1);
    let mut dpsi = Vec::with_capacity(steps + 1);
    let (mut y, mut dy) = init;
    psi.push(y);
    dpsi.push(dy);
    let mut r0 = rate(lo)?;
    for k in 0..steps {
        let x = lo + k as f64 * h;
        let rm = rate(x + 0.5 * h)?;
        let r1 = rate(lo + (k + 1) as f64 * h)?;
        let (k1y, k1d) = (dy, r0 * y);
        let (k2y, k2d) = (dy + 0.5 * h * k1d, rm * (y + 0.5 * h * k1y));
        let (k3y, k3d) = (dy + 0.5 * h * k2d, rm * (y + 0.5 * h * k2y));
        let (k4y, k4d) = (dy + h * k3d, r1 * (y + h * k3y));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        psi.push(y);
        dpsi.push(dy);
        r0 = r1;
    }
    Ok(AxisSolution {
        axis,
        lo,
        hi,
        psi,
        dpsi,
    })
}
