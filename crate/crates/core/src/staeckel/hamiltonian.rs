use std::collections::BTreeMap;

use crate::error::{Error, EvalError, Result};
use crate::expr::Expr;
use crate::sampling::Domain;

use super::matrix::{StaeckelMatrix, DEFAULT_DET_EPS};

/// `H = Σ_i coeff[i]·p_i² + potential`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    coeffs: Vec<Expr>,
    potential: Expr,
}

impl Hamiltonian {
    pub fn new(coeffs: Vec<Expr>, potential: Expr) -> Self {
        Self { coeffs, potential }
    }

    pub fn kinetic(coeffs: Vec<Expr>) -> Self {
        Self::new(coeffs, Expr::zero())
    }

    /// A function of `x` alone, viewed as a Hamiltonian.
    pub fn potential_only(n: usize, potential: Expr) -> Self {
        Self::new(vec![Expr::zero(); n], potential)
    }

    pub fn with_potential(&self, potential: Expr) -> Self {
        Self::new(self.coeffs.clone(), potential)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `H^{ii}`.
    pub fn coeff(&self, i: usize) -> &Expr {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    pub fn to_phase_poly(&self) -> PhasePoly {
        let n = self.dim();
        let mut poly = PhasePoly::zero(n);
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut m = vec![0u8; n];
            m[i] = 2;
            poly.add_term(m, c.clone());
        }
        poly.add_term(vec![0u8; n], self.potential.clone());
        poly
    }

    pub fn evaluate(&self, x: &[f64], p: &[f64]) -> std::result::Result<f64, EvalError> {
        let mut acc = self.potential.eval(x)?;
        for (c, pi) in self.coeffs.iter().zip(p) {
            acc += c.eval(x)? * pi * pi;
        }
        Ok(acc)
    }
}

/// Momentum exponents of a monomial `p^m`.
pub type MomentumIndex = Vec<u8>;

/// Polynomial in the momenta with coefficients depending on `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoly {
    n: usize,
    terms: BTreeMap<MomentumIndex, Expr>,
}

impl PhasePoly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `coeff·p^m`, merging with an existing term of the same index.
    pub fn add_term(&mut self, m: MomentumIndex, coeff: Expr) {
        assert_eq!(m.len(), self.n, "momentum index has wrong length");
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let merged = old + coeff;
                if !merged.is_zero() {
                    self.terms.insert(m, merged);
                }
            }
            None => {
                self.terms.insert(m, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MomentumIndex, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u8]) -> Option<&Expr> {
        self.terms.get(m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &PhasePoly) -> PhasePoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &PhasePoly) -> PhasePoly {
        let mut out = PhasePoly::zero(self.n);
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                let m = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.add_term(m, a.clone() * b.clone());
            }
        }
        out
    }

    /// `∂/∂x_i`, coefficient-wise.
    pub fn diff_x(&self, i: usize) -> PhasePoly {
        let mut out = PhasePoly::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.diff(i));
        }
        out
    }

    /// `∂/∂p_i`.
    pub fn diff_p(&self, i: usize) -> PhasePoly {
        let mut out = PhasePoly::zero(self.n);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[i] -= 1;
            out.add_term(m2, Expr::constant(m[i] as f64) * c.clone());
        }
        out
    }

    /// `{P, Q} = Σ_i (∂P/∂p_i ∂Q/∂x_i − ∂P/∂x_i ∂Q/∂p_i)`.
    pub fn bracket(&self, other: &PhasePoly) -> PhasePoly {
        assert_eq!(
            self.n, other.n,
            "bracket of polynomials in different dimensions"
        );
        let mut out = PhasePoly::zero(self.n);
        for i in 0..self.n {
            out = out.add(&self.diff_p(i).mul(&other.diff_x(i)));
            let neg = other.diff_p(i).mul(&self.diff_x(i));
            for (m, c) in neg.terms {
                out.add_term(m, c.neg());
            }
        }
        out
    }

    pub fn simplify(&self) -> PhasePoly {
        let mut out = PhasePoly::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.simplify());
        }
        out
    }

    pub fn evaluate(&self, x: &[f64], p: &[f64]) -> std::result::Result<f64, EvalError> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mono: f64 = m.iter().zip(p).map(|(&k, &pi)| pi.powi(k as i32)).product();
            acc += c.eval(x)? * mono;
        }
        Ok(acc)
    }
}

/// Exact symbolic bracket `{H, F}`.
pub fn poisson_bracket(h: &Hamiltonian, f: &Hamiltonian) -> PhasePoly {
    h.to_phase_poly().bracket(&f.to_phase_poly())
}

/// Hamiltonians `H_α` of the Stäckel system, solving `S·H = (p_1², …, p_n²)`:
/// `H^{ii}_(α) = Δ_αi / φ`, zero potential.
pub fn hamiltonians(s: &StaeckelMatrix, domain: &Domain) -> Result<Vec<Hamiltonian>> {
    s.check_row_locality()?;
    s.check_nondegenerate(domain, DEFAULT_DET_EPS)?;
    let adj = s.adjugate();
    let n = s.dim();
    Ok((0..n)
        .map(|alpha| Hamiltonian::kinetic((0..n).map(|i| adj.inverse_entry(alpha, i)).collect()))
        .collect())
}

/// Potentials `U_α` solving `S·U = (V_1(x_1), …, V_n(x_n))`.
///
/// `v[i]` must depend on `x_i` only.
pub fn potentials(s: &StaeckelMatrix, v: &[Expr], domain: &Domain) -> Result<Vec<Expr>> {
    let n = s.dim();
    check_axis_functions(v, n)?;
    s.check_row_locality()?;
    s.check_nondegenerate(domain, DEFAULT_DET_EPS)?;
    let adj = s.adjugate();
    Ok((0..n)
        .map(|alpha| {
            let num = Expr::sum(
                (0..n)
                    .map(|i| adj.delta[alpha][i].clone() * v[i].clone())
                    .collect::<Vec<_>>(),
            );
            Expr::quotient(num, adj.phi.clone())
        })
        .collect())
}

/// `v` must have one entry per axis and `v[i]` may only reference `x_i`.
pub fn check_axis_functions(v: &[Expr], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} axis functions, got {}",
            v.len()
        )));
    }
    for (i, e) in v.iter().enumerate() {
        if let Some(&k) = e.variables().iter().find(|&&k| k != i) {
            return Err(Error::InvalidArgument(format!(
                "V_{} must depend on x{} only but references x{}",
                i + 1,
                i + 1,
                k + 1
            )));
        }
    }
    Ok(())
}
