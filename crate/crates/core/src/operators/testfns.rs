//! Random test functions for the application-based checks.

use rand::Rng;

use crate::expr::Expr;

/// Exponent vectors of all monomials in `n` variables of total degree ≤ `degree`.
pub fn monomials(n: usize, degree: usize) -> Vec<Vec<u8>> {
    fn go(n: usize, left: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=left {
            prefix.push(k as u8);
            go(n, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, degree, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `Σ c_m Π (x_i − center_i)^{m_i}` over all monomials of degree ≤ `degree`,
/// with coefficients uniform in `[-1, 1]`.
pub fn random_polynomial(n: usize, degree: usize, center: &[f64], rng: &mut impl Rng) -> Expr {
    let shifted: Vec<Expr> = (0..n)
        .map(|i| Expr::var(i) - Expr::constant(center[i]))
        .collect();
    let terms = monomials(n, degree)
        .into_iter()
        .map(|m| {
            let c = rng.gen_range(-1.0..=1.0);
            let factors = m
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| shifted[i].clone().powi(k as i32));
            Expr::product(std::iter::once(Expr::constant(c)).chain(factors))
        })
        .collect::<Vec<_>>();
    Expr::sum(terms)
}

/// `V_i(x_i)`: a random polynomial of degree ≤ `degree` in each axis
/// variable, centred on the interval midpoints.
pub fn random_axis_functions(
    intervals: &[(f64, f64)],
    degree: usize,
    rng: &mut impl Rng,
) -> Vec<Expr> {
    intervals
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| random_polynomial(1, degree, &[0.5 * (lo + hi)], rng).on_axis(i))
        .collect()
}

/// `Π_i exp(1 − 1/(1 − u_i²))` with `u_i` the affine image of `[lo_i, hi_i]`
/// onto `(-1, 1)`. Smooth, and every derivative vanishes at the boundary.
/// Only meaningful inside the box; outside it the expression is not zero.
pub fn bump(intervals: &[(f64, f64)]) -> Expr {
    let factors = intervals
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let u = (Expr::constant(2.0) * Expr::var(i) - Expr::constant(lo + hi))
                / Expr::constant(hi - lo);
            let inner = Expr::one() - Expr::one() / (Expr::one() - u.powi(2));
            inner.exp()
        })
        .collect::<Vec<_>>();
    Expr::product(factors)
}
