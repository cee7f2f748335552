use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::operators::quantize_with_potentials;
use crate::report::{Report, ReportBuilder};
use crate::sampling::Domain;
use crate::staeckel::{check_axis_functions, StaeckelMatrix};

use super::ode::{separated_rhs, solve_separated_ode, EnergyVector};
use super::product::{assemble_product, ProductEigenfunction};

/// Upper bound on the number of grid tuples visited by [`verify_eigen`].
pub const MAX_TUPLES: usize = 10_000;

const EPS: f64 = 1e-12;

/// Settings for [`verify_eigen_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    pub steps: usize,
    /// Bound on the relative eigen-residual.
    pub tol: f64,
    /// Bound on the absolute residual of `Σ_j S_αj Ȟ_j Ψ = (∂_α² + V_α) Ψ`.
    pub uncoupling_tol: f64,
    /// `(ψ, ψ')` at the left end of each axis; `(1, 0)` when absent.
    pub init: Option<Vec<(f64, f64)>>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            steps: 256,
            tol: 1e-5,
            uncoupling_tol: 1e-8,
            init: None,
        }
    }
}

/// The axis solutions together with the data that produced them.
#[derive(Debug, Clone)]
pub struct SeparatedSolution {
    pub energy: EnergyVector,
    pub init: Vec<(f64, f64)>,
    pub product: ProductEigenfunction,
}

/// Solves every separated ODE on its domain interval, in parallel.
pub fn separate(
    s: &StaeckelMatrix,
    v: &[Expr],
    e: &EnergyVector,
    domain: &Domain,
    steps: usize,
    init: Option<&[(f64, f64)]>,
) -> Result<SeparatedSolution> {
    let n = s.dim();
    if domain.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "domain has {} axes, matrix {n}",
            domain.dim()
        )));
    }
    let init = match init {
        Some(init) if init.len() != n => {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} initial conditions, got {}",
                init.len()
            )))
        }
        Some(init) => init.to_vec(),
        None => vec![(1.0, 0.0); n],
    };
    let axes = (0..n)
        .into_par_iter()
        .map(|alpha| {
            let r = separated_rhs(s, v, e, alpha)?;
            solve_separated_ode(&r, alpha, domain.interval(alpha), init[alpha], steps)
        })
        .collect::<Result<Vec<_>>>()?;
    let product = assemble_product(axes)?;
    if product
        .axes()
        .iter()
        .any(|a| a.psi.iter().all(|&p| p == 0.0))
    {
        return Err(Error::InvalidArgument(
            "a separated solution vanishes identically".into(),
        ));
    }
    Ok(SeparatedSolution {
        energy: e.clone(),
        init,
        product,
    })
}

/// [`verify_eigen_with`] with default initial conditions and an uncoupling
/// tolerance of `1e-8`.
pub fn verify_eigen(
    s: &StaeckelMatrix,
    v: &[Expr],
    e: &EnergyVector,
    domain: &Domain,
    steps: usize,
    tol: f64,
) -> Result<Report> {
    let opts = EigenOptions {
        steps,
        tol,
        ..EigenOptions::default()
    };
    verify_eigen_with(s, v, e, domain, &opts)
}

/// Per-axis node indices: interior nodes only, thinned evenly so the tensor
/// grid has at most [`MAX_TUPLES`] points.
fn tuple_axes(n: usize, steps: usize) -> Vec<usize> {
    let mut per_axis = 1;
    while (per_axis + 1usize)
        .checked_pow(n as u32)
        .is_some_and(|c| c <= MAX_TUPLES)
    {
        per_axis += 1;
    }
    // interior nodes for the 5-point stencil are 2..=steps-2
    let m = steps - 3;
    if m <= per_axis {
        return (2..=steps - 2).collect();
    }
    (0..per_axis)
        .map(|k| 2 + (k as f64 * (m - 1) as f64 / (per_axis - 1) as f64).round() as usize)
        .collect()
}

struct TupleResult {
    point: Vec<f64>,
    psi: f64,
    eigen: Vec<f64>,
    uncoupling: Vec<f64>,
}

/// Checks `Ȟ_α Ψ = E_α Ψ` on the grid for every `α`, with second derivatives
/// taken by finite differences of the computed `ψ_α`. The eigen-residual is
/// `max |Ȟ_α Ψ − E_α Ψ| / (1e-12 + max |Ψ|)`.
pub fn verify_eigen_with(
    s: &StaeckelMatrix,
    v: &[Expr],
    e: &EnergyVector,
    domain: &Domain,
    opts: &EigenOptions,
) -> Result<Report> {
    let n = s.dim();
    check_axis_functions(v, n)?;
    let sol = separate(s, v, e, domain, opts.steps, opts.init.as_deref())?;
    let ops = quantize_with_potentials(s, v, domain)?;
    let op_tapes: Vec<Vec<(Vec<u8>, Tape)>> = ops
        .iter()
        .map(|op| {
            op.terms()
                .map(|(m, c)| (m.clone(), Tape::compile(c)))
                .collect()
        })
        .collect();
    let s_tapes: Vec<Vec<Tape>> = s
        .rows()
        .iter()
        .map(|row| row.iter().map(Tape::compile).collect())
        .collect();
    let v_tapes: Vec<Tape> = v.iter().map(Tape::compile).collect();

    let idx = tuple_axes(n, opts.steps);
    let total = idx.len().pow(n as u32);
    let product = &sol.product;
    let results = (0..total)
        .into_par_iter()
        .map_init(Vec::new, |buf, t| -> Result<TupleResult> {
            let mut rest = t;
            let tuple: Vec<usize> = (0..n)
                .map(|_| {
                    let k = idx[rest % idx.len()];
                    rest /= idx.len();
                    k
                })
                .collect();
            let x = product.point(&tuple);
            let psi = product.value(&tuple)?;
            let mut h_psi = Vec::with_capacity(n);
            for terms in &op_tapes {
                let mut acc = 0.0;
                for (m, tape) in terms {
                    acc += tape.eval_with(&x, buf)? * product.derivative(m, &tuple)?;
                }
                h_psi.push(acc);
            }
            let eigen = (0..n).map(|a| (h_psi[a] - e.get(a) * psi).abs()).collect();
            let mut uncoupling = Vec::with_capacity(n);
            for a in 0..n {
                let mut lhs = 0.0;
                for j in 0..n {
                    lhs += s_tapes[a][j].eval_with(&x, buf)? * h_psi[j];
                }
                let rhs = product.second(a, &tuple)? + v_tapes[a].eval_with(&x, buf)? * psi;
                uncoupling.push((lhs - rhs).abs());
            }
            Ok(TupleResult {
                point: x,
                psi,
                eigen,
                uncoupling,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let scale = EPS + results.iter().map(|r| r.psi.abs()).fold(0.0, f64::max);
    let mut report = ReportBuilder::new("eigen", opts.tol);
    for a in 0..n {
        let worst = results
            .iter()
            .enumerate()
            .max_by(|(i, p), (j, q)| p.eigen[a].total_cmp(&q.eigen[a]).then(j.cmp(i)))
            .expect("at least one tuple");
        report.push_with_tol(
            format!("H{} eigen", a + 1),
            worst.1.eigen[a] / scale,
            opts.tol,
            Some(worst.1.point.clone()),
        );
    }
    for a in 0..n {
        let worst = results
            .iter()
            .enumerate()
            .max_by(|(i, p), (j, q)| p.uncoupling[a].total_cmp(&q.uncoupling[a]).then(j.cmp(i)))
            .expect("at least one tuple");
        report.push_with_tol(
            format!("row {} uncoupling", a + 1),
            worst.1.uncoupling[a],
            opts.uncoupling_tol,
            Some(worst.1.point.clone()),
        );
    }
    report.note(format!(
        "{} grid tuples, {} steps per axis",
        results.len(),
        opts.steps
    ));
    Ok(report.finish())
}
