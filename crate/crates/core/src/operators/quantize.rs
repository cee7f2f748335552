use crate::error::Result;
use crate::expr::Expr;
use crate::report::{Report, ReportBuilder};
use crate::sampling::{is_zero_sampled, Domain};
use crate::staeckel::{
    check_axis_functions, hamiltonians, potentials, Hamiltonian, StaeckelMatrix,
};

use super::diffop::DiffOp;
use super::testfns::random_polynomial;

/// `Σ_i H^{ii} ∂_i² + U` for a diagonal Hamiltonian.
pub fn quantize_hamiltonian(h: &Hamiltonian) -> DiffOp {
    let n = h.dim();
    let terms = (0..n)
        .map(|i| {
            let mut m = vec![0u8; n];
            m[i] = 2;
            (m, h.coeff(i).clone())
        })
        .chain(std::iter::once((vec![0u8; n], h.potential().clone())));
    DiffOp::from_terms(n, terms).expect("second-order terms are within the order cap")
}

/// `Ĥ_α = Σ_i (Δ_αi/φ) ∂_i²`. With `φ = det S` and `Δ_αi` free of `x_i`,
/// the divergence form `(1/φ) ∂_i (H^{ii} φ ∂_i)` has no first-order part,
/// so the operator is stored directly in this reduced form; see
/// [`check_divergence_form`] for the equivalence.
pub fn quantize(s: &StaeckelMatrix, domain: &Domain) -> Result<Vec<DiffOp>> {
    Ok(hamiltonians(s, domain)?
        .iter()
        .map(quantize_hamiltonian)
        .collect())
}

/// Adds `u` to the order-zero term.
pub fn add_potential(op: &DiffOp, u: &Expr) -> DiffOp {
    op.add(&DiffOp::multiplication(op.dim(), u.clone()))
}

/// `Ȟ_α = Ĥ_α + U_α` with `S·U = V`.
pub fn quantize_with_potentials(
    s: &StaeckelMatrix,
    v: &[Expr],
    domain: &Domain,
) -> Result<Vec<DiffOp>> {
    let us = potentials(s, v, domain)?;
    Ok(quantize(s, domain)?
        .iter()
        .zip(&us)
        .map(|(op, u)| add_potential(op, u))
        .collect())
}

/// `(1/φ) Σ_i ∂_i (H^{ii} φ ∂_i f)`, built without the cofactor shortcut.
pub fn divergence_form_apply(h: &Hamiltonian, phi: &Expr, f: &Expr) -> Expr {
    let parts = (0..h.dim())
        .map(|i| {
            let flux = Expr::product([h.coeff(i).clone(), phi.clone(), f.diff(i)]);
            Expr::quotient(flux.diff(i), phi.clone())
        })
        .collect::<Vec<_>>();
    Expr::sum(parts)
}

/// `Σ_i H^{ii}_(α) [∂_i² f + V_i f]`, the grouping of `Ȟ_α` by axis.
pub fn grouped_potential_apply(h: &Hamiltonian, v: &[Expr], f: &Expr) -> Expr {
    let parts = (0..h.dim())
        .map(|i| h.coeff(i).clone() * (f.diff_n(i, 2) + v[i].clone() * f.clone()))
        .collect::<Vec<_>>();
    Expr::sum(parts)
}

const TEST_FUNCTIONS: usize = 20;

/// Applies `Ĥ_α` and the divergence form to random polynomials and zero-tests
/// the difference.
pub fn check_divergence_form(s: &StaeckelMatrix, domain: &Domain, tol: f64) -> Result<Report> {
    let hams = hamiltonians(s, domain)?;
    let phi = s.determinant();
    let mut rng = domain.rng(0xd1f);
    let fs: Vec<_> = (0..TEST_FUNCTIONS)
        .map(|_| random_polynomial(s.dim(), 4, &domain.center(), &mut rng))
        .collect();
    let mut report = ReportBuilder::new("divergence-form", tol);
    for (a, h) in hams.iter().enumerate() {
        let op = quantize_hamiltonian(h);
        let mut worst = (0.0, None);
        for f in &fs {
            let t = is_zero_sampled(
                &(op.apply(f) - divergence_form_apply(h, &phi, f)),
                domain,
                tol,
            )?;
            if t.max_abs >= worst.0 {
                worst = (t.max_abs, t.witness);
            }
        }
        report.push(format!("H{}", a + 1), worst.0, worst.1);
    }
    Ok(report.finish())
}

/// Compares `Ĥ_α + U_α` with the axis-grouped form on random polynomials.
pub fn check_potential_grouping(
    s: &StaeckelMatrix,
    v: &[Expr],
    domain: &Domain,
    tol: f64,
) -> Result<Report> {
    check_axis_functions(v, s.dim())?;
    let hams = hamiltonians(s, domain)?;
    let ops = quantize_with_potentials(s, v, domain)?;
    let mut rng = domain.rng(0x9a0);
    let fs: Vec<_> = (0..TEST_FUNCTIONS)
        .map(|_| random_polynomial(s.dim(), 4, &domain.center(), &mut rng))
        .collect();
    let mut report = ReportBuilder::new("potential-grouping", tol);
    for (a, (h, op)) in hams.iter().zip(&ops).enumerate() {
        let mut worst = (0.0, None);
        for f in &fs {
            let t = is_zero_sampled(
                &(op.apply(f) - grouped_potential_apply(h, v, f)),
                domain,
                tol,
            )?;
            if t.max_abs >= worst.0 {
                worst = (t.max_abs, t.witness);
            }
        }
        report.push(format!("H{}", a + 1), worst.0, worst.1);
    }
    Ok(report.finish())
}
