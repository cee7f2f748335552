use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::staeckel::PhasePoly;

/// Largest total derivative order an operator may carry. Commutators of
/// second-order operators reach exactly this order.
pub const MAX_ORDER: usize = 4;

/// Exponents of a mixed partial derivative `∂^m = ∂_1^{m_1} ⋯ ∂_n^{m_n}`.
pub type MultiIndex = Vec<u8>;

fn order_of(m: &[u8]) -> usize {
    m.iter().map(|&k| k as usize).sum()
}

/// Linear differential operator `Σ_m c_m(x) ∂^m` in normal order: every
/// coefficient multiplies from the left of the derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp {
    n: usize,
    terms: BTreeMap<MultiIndex, Expr>,
}

impl DiffOp {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Multiplication by `f`.
    pub fn multiplication(n: usize, f: Expr) -> Self {
        let mut op = Self::zero(n);
        op.add_term(vec![0; n], f);
        op
    }

    pub fn identity(n: usize) -> Self {
        Self::multiplication(n, Expr::one())
    }

    /// `∂_i^k`.
    pub fn partial(n: usize, i: usize, k: u8) -> Self {
        let mut m = vec![0; n];
        m[i] = k;
        let mut op = Self::zero(n);
        op.add_term(m, Expr::one());
        op
    }

    /// Builds from `(multi-index, coefficient)` pairs, merging duplicates.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Expr)>,
    ) -> Result<Self> {
        let mut op = Self::zero(n);
        for (m, c) in terms {
            if m.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "multi-index {m:?} in dimension {n}"
                )));
            }
            if order_of(&m) > MAX_ORDER {
                return Err(Error::OrderOverflow {
                    order: order_of(&m),
                    cap: MAX_ORDER,
                });
            }
            op.add_term(m, c);
        }
        Ok(op)
    }

    fn add_term(&mut self, m: MultiIndex, c: Expr) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let merged = old + c;
                if !merged.is_zero() {
                    self.terms.insert(m, merged);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> usize {
        self.terms.keys().map(|m| order_of(m)).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u8]) -> Option<&Expr> {
        self.terms.get(m)
    }

    /// Terms of exactly the given total order.
    pub fn terms_of_order(&self, order: usize) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.terms.iter().filter(move |(m, _)| order_of(m) == order)
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone().neg());
        }
        out
    }

    /// Simplifies every coefficient and drops the ones that become zero.
    pub fn simplify(&self) -> DiffOp {
        let mut out = DiffOp::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.simplify());
        }
        out
    }

    /// Normal-ordered `A∘B` by the Leibniz rule:
    /// `a ∂^α ∘ b ∂^β = Σ_{γ≤α} C(α,γ) a (∂^γ b) ∂^{α−γ+β}`.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(
                "composing operators of different dimension".into(),
            ));
        }
        let order = self.order() + other.order();
        if !self.is_zero() && !other.is_zero() && order > MAX_ORDER {
            return Err(Error::OrderOverflow {
                order,
                cap: MAX_ORDER,
            });
        }
        let mut derivs = CoefficientDerivatives::default();
        let mut acc: BTreeMap<MultiIndex, Vec<Expr>> = BTreeMap::new();
        for (alpha, a) in &self.terms {
            for (bi, (beta, b)) in other.terms.iter().enumerate() {
                for gamma in sub_indices(alpha) {
                    let db = derivs.get(bi, b, &gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let binom = multi_binomial(alpha, &gamma);
                    let m: MultiIndex = alpha
                        .iter()
                        .zip(&gamma)
                        .zip(beta)
                        .map(|((a, g), b)| a - g + b)
                        .collect();
                    acc.entry(m).or_default().push(Expr::product([
                        Expr::constant(binom),
                        a.clone(),
                        db,
                    ]));
                }
            }
        }
        let mut out = DiffOp::zero(self.n);
        for (m, parts) in acc {
            out.add_term(m, Expr::sum(parts));
        }
        Ok(out)
    }

    /// `[A, B] = A∘B − B∘A` with simplified coefficients.
    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        Ok(self.compose(other)?.sub(&other.compose(self)?).simplify())
    }

    /// `Σ_m c_m ∂^m f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut derivs = HashMap::new();
        let parts = self
            .terms
            .iter()
            .map(|(m, c)| c.clone() * mixed_partial(f, m, &mut derivs))
            .collect::<Vec<_>>();
        Expr::sum(parts)
    }

    /// Principal symbol: the top-order part with `∂_i` replaced by `p_i`.
    pub fn symbol(&self) -> PhasePoly {
        let top = self.order();
        let mut poly = PhasePoly::zero(self.n);
        for (m, c) in self.terms_of_order(top) {
            poly.add_term(m.clone(), c.clone());
        }
        poly
    }
}

/// `∂^m f`, reusing previously computed lower derivatives.
fn mixed_partial(f: &Expr, m: &[u8], cache: &mut HashMap<MultiIndex, Expr>) -> Expr {
    if m.iter().all(|&k| k == 0) {
        return f.clone();
    }
    if let Some(e) = cache.get(m) {
        return e.clone();
    }
    let i = m.iter().rposition(|&k| k > 0).unwrap();
    let mut lower = m.to_vec();
    lower[i] -= 1;
    let e = mixed_partial(f, &lower, cache).diff(i);
    cache.insert(m.to_vec(), e.clone());
    e
}

#[derive(Default)]
struct CoefficientDerivatives {
    cache: HashMap<(usize, MultiIndex), Expr>,
}

impl CoefficientDerivatives {
    fn get(&mut self, key: usize, b: &Expr, gamma: &[u8]) -> Expr {
        if let Some(e) = self.cache.get(&(key, gamma.to_vec())) {
            return e.clone();
        }
        let mut local = HashMap::new();
        let e = mixed_partial(b, gamma, &mut local);
        self.cache.insert((key, gamma.to_vec()), e.clone());
        e
    }
}

/// All `γ` with `0 ≤ γ ≤ α` componentwise.
fn sub_indices(alpha: &[u8]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::with_capacity(alpha.len())];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |g| {
                    let mut p = prefix.clone();
                    p.push(g);
                    p
                })
            })
            .collect();
    }
    out
}

fn binomial(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn multi_binomial(alpha: &[u8], gamma: &[u8]) -> f64 {
    alpha
        .iter()
        .zip(gamma)
        .map(|(&a, &g)| binomial(a, g))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::sampling::{is_zero_sampled, Domain};

    fn d2(n: usize, i: usize) -> DiffOp {
        DiffOp::partial(n, i, 2)
    }

    #[test]
    fn leibniz_second_derivative_times_coordinate() {
        let x1 = DiffOp::multiplication(1, Expr::var(0));
        let c = d2(1, 0).compose(&x1).unwrap().simplify();
        assert_eq!(c.coefficient(&[2]), Some(&Expr::var(0)));
        assert_eq!(c.coefficient(&[1]).unwrap().as_const(), Some(2.0));
        assert_eq!(c.terms().count(), 2);
    }

    #[test]
    fn independent_partials_compose_to_mixed() {
        let c = d2(2, 0).compose(&d2(2, 1)).unwrap();
        assert_eq!(c.terms().count(), 1);
        assert!(c.coefficient(&[2, 2]).unwrap().is_one());
    }

    #[test]
    fn commutators_of_simple_operators() {
        assert!(d2(2, 0).commutator(&d2(2, 1)).unwrap().is_zero());
        let c = d2(1, 0)
            .commutator(&DiffOp::multiplication(1, Expr::var(0)))
            .unwrap();
        // x∂² − x∂² is not cancelled symbolically, only numerically
        let d = Domain::cube(1, -1.0, 1.0).unwrap();
        if let Some(top) = c.coefficient(&[2]) {
            assert!(is_zero_sampled(top, &d, 1e-15).unwrap().verdict);
        }
        assert_eq!(c.coefficient(&[1]).unwrap().as_const(), Some(2.0));
        assert!(c.coefficient(&[0]).is_none());
    }

    #[test]
    fn order_cap_is_an_error() {
        let third = DiffOp::partial(1, 0, 3);
        assert!(matches!(
            third.compose(&d2(1, 0)),
            Err(Error::OrderOverflow { order: 5, cap: 4 })
        ));
        assert!(DiffOp::from_terms(1, [(vec![5], Expr::one())]).is_err());
    }

    #[test]
    fn apply_examples() {
        let f = parse_expr("x1^3", 1).unwrap();
        let g = d2(1, 0).apply(&f);
        assert_eq!(g.eval(&[2.0]).unwrap(), 12.0);
        assert!(DiffOp::zero(1).apply(&f).is_zero());
        let laplacian_piece = d2(2, 0).add(&d2(2, 1));
        let h = parse_expr("cos(x1)*cos(x2)", 2).unwrap();
        let r = laplacian_piece.apply(&h) + Expr::constant(2.0) * h;
        assert!(
            is_zero_sampled(&r, &Domain::cube(2, -2.0, 2.0).unwrap(), 1e-14)
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn mixed_partial_order_irrelevant() {
        let f = parse_expr("sin(x1*x2)*x1^2", 2).unwrap();
        let op = DiffOp::from_terms(2, [(vec![1, 2], Expr::one())]).unwrap();
        let alt = f.diff(1).diff(1).diff(0);
        let d = Domain::cube(2, -1.0, 1.0).unwrap();
        assert!(
            is_zero_sampled(&(op.apply(&f) - alt), &d, 1e-12)
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn symbol_takes_top_order() {
        let op = DiffOp::from_terms(
            2,
            [
                (vec![2, 0], Expr::var(1)),
                (vec![0, 2], Expr::one()),
                (vec![1, 0], Expr::var(0)),
            ],
        )
        .unwrap();
        let s = op.symbol();
        assert_eq!(s.terms().count(), 2);
        assert_eq!(s.coefficient(&[2, 0]), Some(&Expr::var(1)));
    }

    #[test]
    fn sub_indices_enumerate_box() {
        assert_eq!(sub_indices(&[2, 1]).len(), 6);
        assert_eq!(multi_binomial(&[2, 2], &[1, 1]), 4.0);
    }
}
