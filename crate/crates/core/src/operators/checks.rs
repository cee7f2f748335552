use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::report::{Report, ReportBuilder};
use crate::sampling::{is_zero_sampled, Domain};

use super::diffop::DiffOp;
use super::quadrature::{gauss_legendre, pairwise_sum};
use super::testfns::{bump, random_polynomial};

const APPLICATION_TEST_FUNCTIONS: usize = 20;

/// `64³` nodes is the largest grid [`check_self_adjoint`] builds.
pub const MAX_QUADRATURE_DIM: usize = 3;

/// Pairwise commutation, verified along two routes:
///
/// * `coefficients`: every coefficient of the normal-ordered `[A, B]` is
///   zero-tested;
/// * `applied`: `A(B f) − B(A f)` is zero-tested for random polynomials `f`
///   of degree ≤ 4, which never forms the composed operator.
pub fn check_commutation(ops: &[DiffOp], domain: &Domain, tol: f64) -> Result<Report> {
    let mut report = ReportBuilder::new("commute", tol);
    let n = domain.dim();
    let mut rng = domain.rng(0xc0);
    let fs: Vec<_> = (0..APPLICATION_TEST_FUNCTIONS)
        .map(|_| random_polynomial(n, 4, &domain.center(), &mut rng))
        .collect();
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            let comm = ops[a].commutator(&ops[b])?;
            let mut worst = (0.0, None);
            for (_, c) in comm.terms() {
                let t = is_zero_sampled(c, domain, tol)?;
                if t.max_abs >= worst.0 {
                    worst = (t.max_abs, t.witness);
                }
            }
            report.push(
                format!("[H{},H{}] coefficients", a + 1, b + 1),
                worst.0,
                worst.1,
            );

            let mut worst = (0.0, None);
            for f in &fs {
                let r = ops[a].apply(&ops[b].apply(f)) - ops[b].apply(&ops[a].apply(f));
                let t = is_zero_sampled(&r, domain, tol)?;
                if t.max_abs >= worst.0 {
                    worst = (t.max_abs, t.witness);
                }
            }
            report.push(format!("[H{},H{}] applied", a + 1, b + 1), worst.0, worst.1);
        }
    }
    Ok(report.finish())
}

/// Tensor-product Gauss–Legendre settings for [`check_self_adjoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    pub pairs: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_axis: 64,
            pairs: 10,
        }
    }
}

struct Grid {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn tensor_grid(domain: &Domain, m: usize) -> Grid {
    let (x, w) = gauss_legendre(m);
    let mut points = vec![Vec::new()];
    let mut weights = vec![1.0];
    for &(lo, hi) in domain.intervals() {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut p2 = Vec::with_capacity(points.len() * m);
        let mut w2 = Vec::with_capacity(points.len() * m);
        for (p, pw) in points.iter().zip(&weights) {
            for k in 0..m {
                let mut q = p.clone();
                q.push(mid + half * x[k]);
                p2.push(q);
                w2.push(pw * half * w[k]);
            }
        }
        points = p2;
        weights = w2;
    }
    Grid { points, weights }
}

fn integrate(tape: &Tape, grid: &Grid) -> Result<f64> {
    let values = grid
        .points
        .par_iter()
        .zip(&grid.weights)
        .map_init(Vec::new, |buf, (p, w)| {
            tape.eval_with(p, buf).map(|v| v * w)
        })
        .collect::<std::result::Result<Vec<f64>, _>>()?;
    Ok(pairwise_sum(&values))
}

fn check_weight(phi: &Expr, grid: &Grid) -> Result<()> {
    let tape = Tape::compile(phi);
    let mut buf = Vec::new();
    let mut sign = 0.0;
    for p in &grid.points {
        let v = tape.eval_with(p, &mut buf)?;
        if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
            return Err(Error::QuadratureFailure(format!(
                "weight vanishes or changes sign near {p:?}"
            )));
        }
        sign = v.signum();
    }
    Ok(())
}

/// `⟨op f, h⟩_φ − ⟨f, op h⟩_φ` with `⟨f, h⟩_φ = ∫ f h φ dx` over the box.
pub fn symmetry_defect(
    op: &DiffOp,
    phi: &Expr,
    f: &Expr,
    h: &Expr,
    domain: &Domain,
    quad: QuadratureSpec,
) -> Result<f64> {
    let grid = tensor_grid(domain, quad.nodes_per_axis);
    check_weight(phi, &grid)?;
    defect_on(op, phi, f, h, &grid)
}

fn defect_on(op: &DiffOp, phi: &Expr, f: &Expr, h: &Expr, grid: &Grid) -> Result<f64> {
    let integrand = Expr::product([op.apply(f), h.clone(), phi.clone()])
        - Expr::product([f.clone(), op.apply(h), phi.clone()]);
    integrate(&Tape::compile(&integrand), grid)
}

/// Symmetry of `op` for the weight `φ`, tested on `quad.pairs` pairs of
/// compactly supported functions `bump·(random cubic)`.
pub fn check_self_adjoint(
    op: &DiffOp,
    phi: &Expr,
    domain: &Domain,
    quad: QuadratureSpec,
    tol: f64,
) -> Result<Report> {
    if op.order() > 2 {
        return Err(Error::InvalidArgument(format!(
            "self-adjointness check needs order ≤ 2, got {}",
            op.order()
        )));
    }
    if domain.dim() > MAX_QUADRATURE_DIM {
        return Err(Error::InvalidArgument(format!(
            "tensor quadrature is limited to {MAX_QUADRATURE_DIM} dimensions, got {}",
            domain.dim()
        )));
    }
    let grid = tensor_grid(domain, quad.nodes_per_axis);
    check_weight(phi, &grid)?;
    let b = bump(domain.intervals());
    let mut rng = domain.rng(0x5a);
    let n = domain.dim();
    let mut report = ReportBuilder::new("selfadjoint", tol);
    let mut worst = 0.0f64;
    for _ in 0..quad.pairs {
        let f = b.clone() * random_polynomial(n, 3, &domain.center(), &mut rng);
        let h = b.clone() * random_polynomial(n, 3, &domain.center(), &mut rng);
        worst = worst.max(defect_on(op, phi, &f, &h, &grid)?.abs());
    }
    report.push(format!("max over {} pairs", quad.pairs), worst, None);
    Ok(report.finish())
}
