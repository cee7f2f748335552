//! Classical-level verifications: involution of the Hamiltonians, the
//! cofactor identity behind the quantum commutation, and the Benenti
//! compatibility condition for potentials.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::report::{Report, ReportBuilder};
use crate::sampling::{is_zero_sampled, Domain, ZeroTest};

use super::hamiltonian::{hamiltonians, poisson_bracket, potentials, Hamiltonian};
use super::matrix::{Adjugate, StaeckelMatrix};

/// Default zero-test tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Identities needing first derivatives of the coefficients.
    pub first_order: f64,
    /// Identities needing second derivatives of quotients.
    pub second_order: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            first_order: 1e-9,
            second_order: 1e-8,
        }
    }
}

/// Zero-tests every expression and records the worst as one finding.
fn push_max(
    report: &mut ReportBuilder,
    label: String,
    exprs: impl IntoIterator<Item = Expr>,
    domain: &Domain,
    tol: f64,
) -> Result<()> {
    let mut worst: Option<ZeroTest> = None;
    for e in exprs {
        let t = is_zero_sampled(&e, domain, tol)?;
        if worst.as_ref().is_none_or(|w| t.max_abs > w.max_abs) {
            worst = Some(t);
        }
    }
    match worst {
        Some(t) => report.push(label, t.max_abs, t.witness),
        None => report.push(label, 0.0, None),
    }
    Ok(())
}

/// `{H_α, H_β} = 0` for all `α < β`, coefficient by coefficient.
pub fn check_involution_of(hams: &[Hamiltonian], domain: &Domain, tol: f64) -> Result<Report> {
    let mut report = ReportBuilder::new("involution", tol);
    for a in 0..hams.len() {
        for b in a + 1..hams.len() {
            let bracket = poisson_bracket(&hams[a], &hams[b]).simplify();
            let coeffs = bracket.terms().map(|(_, c)| c.clone()).collect::<Vec<_>>();
            push_max(
                &mut report,
                format!("{{H{},H{}}}", a + 1, b + 1),
                coeffs,
                domain,
                tol,
            )?;
        }
    }
    Ok(report.finish())
}

/// Involution of the Stäckel Hamiltonians. Row-locality is checked first.
pub fn check_involution(s: &StaeckelMatrix, domain: &Domain, tol: f64) -> Result<Report> {
    s.check_row_locality()?;
    check_involution_of(&hamiltonians(s, domain)?, domain, tol)
}

/// Involution of `H_α + U_α` with `U` built from `v` by `S·U = V`.
pub fn check_involution_with_potentials(
    s: &StaeckelMatrix,
    v: &[Expr],
    domain: &Domain,
    tol: f64,
) -> Result<Report> {
    s.check_row_locality()?;
    let us = potentials(s, v, domain)?;
    let hams: Vec<_> = hamiltonians(s, domain)?
        .iter()
        .zip(us)
        .map(|(h, u)| h.with_potential(u))
        .collect();
    check_involution_of(&hams, domain, tol)
}

/// `(Δ_αi Δ_βj − Δ_αj Δ_βi) / φ`.
pub fn cofactor_pair_quotient(
    adj: &Adjugate,
    alpha: usize,
    beta: usize,
    i: usize,
    j: usize,
) -> Expr {
    let d = &adj.delta;
    let num = d[alpha][i].clone() * d[beta][j].clone() - d[alpha][j].clone() * d[beta][i].clone();
    Expr::quotient(num, adj.phi.clone())
}

/// `∂_i [(Δ_αi Δ_βj − Δ_αj Δ_βi) / φ]`, which vanishes identically.
pub fn eq6_expression(adj: &Adjugate, alpha: usize, beta: usize, i: usize, j: usize) -> Expr {
    cofactor_pair_quotient(adj, alpha, beta, i, j).diff(i)
}

/// The cofactor identity `∂_i [(Δ_αi Δ_βj − Δ_αj Δ_βi)/φ] = 0` over all
/// `α < β` and all `i, j`.
pub fn check_identity_eq6(s: &StaeckelMatrix, domain: &Domain, tol: f64) -> Result<Report> {
    s.check_row_locality()?;
    let n = s.dim();
    let adj = s.adjugate();
    let mut report = ReportBuilder::new("eq6", tol);
    for a in 0..n {
        for b in a + 1..n {
            for i in 0..n {
                for j in 0..n {
                    let e = eq6_expression(&adj, a, b, i, j);
                    push_max(
                        &mut report,
                        format!("a={},b={},i={},j={}", a + 1, b + 1, i + 1, j + 1),
                        [e],
                        domain,
                        tol,
                    )?;
                }
            }
        }
    }
    Ok(report.finish())
}

/// `H^{ss}_(α) ∂_s U_β − H^{ss}_(β) ∂_s U_α = 0` for every `s`.
pub fn check_benenti(
    ha: &Hamiltonian,
    hb: &Hamiltonian,
    domain: &Domain,
    tol: f64,
) -> Result<Report> {
    if ha.dim() != hb.dim() {
        return Err(Error::DimensionMismatch(
            "Hamiltonians of different dimension".into(),
        ));
    }
    let mut report = ReportBuilder::new("benenti", tol);
    for s in 0..ha.dim() {
        let e = ha.coeff(s).clone() * hb.potential().diff(s)
            - hb.coeff(s).clone() * ha.potential().diff(s);
        push_max(&mut report, format!("s={}", s + 1), [e], domain, tol)?;
    }
    Ok(report.finish())
}
