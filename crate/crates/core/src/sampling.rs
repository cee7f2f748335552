//! Randomized zero testing over box domains.
//!
//! The identities this crate checks are rational in the coordinates, so a
//! nonzero expression vanishes only on a measure-zero set and a few hundred
//! uniform samples expose it with overwhelming probability. Points where
//! evaluation fails (a pole, a log of a negative number) are skipped and
//! replaced by fresh candidates, up to ten times the requested sample count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, EvalError, Result};
use crate::expr::{Expr, Tape};

pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_SEED: u64 = 42;
const OVERSAMPLING: usize = 10;

/// Box `[lo_1, hi_1] × … × [lo_n, hi_n]` together with the sampling budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    intervals: Vec<(f64, f64)>,
    samples: usize,
    seed: u64,
}

impl Domain {
    pub fn new(intervals: Vec<(f64, f64)>, samples: usize, seed: u64) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidDomain("no intervals".into()));
        }
        for (k, &(lo, hi)) in intervals.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidDomain(format!(
                    "axis {} has interval [{lo}, {hi}]",
                    k + 1
                )));
            }
        }
        if samples == 0 {
            return Err(Error::InvalidDomain(
                "sample count must be at least 1".into(),
            ));
        }
        Ok(Self {
            intervals,
            samples,
            seed,
        })
    }

    /// `[lo, hi]^n` with default sampling parameters.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi); n], DEFAULT_SAMPLES, DEFAULT_SEED)
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidDomain(
                "sample count must be at least 1".into(),
            ));
        }
        self.samples = samples;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn interval(&self, axis: usize) -> (f64, f64) {
        self.intervals[axis]
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Deterministic RNG for an auxiliary purpose (test functions etc.),
    /// independent of the point streams.
    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_0000_0000_0000);
        rng.set_stream(salt);
        rng
    }

    /// The `index`-th candidate point. Each index owns its own ChaCha stream,
    /// so the sequence does not depend on evaluation order or thread count.
    pub fn point(&self, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        self.intervals
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }
}

/// Maximum of `|value|` over the accepted sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMax {
    pub max_abs: f64,
    /// Point attaining the maximum.
    pub argmax: Vec<f64>,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Evaluates `f` at `domain.samples()` valid points and returns the largest
/// magnitude. Failed or non-finite evaluations are skipped.
pub fn sample_max<F>(domain: &Domain, f: F) -> Result<SampledMax>
where
    F: Fn(&[f64]) -> std::result::Result<f64, EvalError> + Sync,
{
    sample_max_with(domain, || (), |_, x| f(x))
}

/// Like [`sample_max`], with per-thread scratch state created by `init`.
pub fn sample_max_with<S, I, F>(domain: &Domain, init: I, f: F) -> Result<SampledMax>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &[f64]) -> std::result::Result<f64, EvalError> + Sync,
{
    let wanted = domain.samples;
    let cap = wanted * OVERSAMPLING;
    let mut best = SampledMax {
        max_abs: 0.0,
        argmax: Vec::new(),
        evaluated: 0,
        skipped: 0,
    };
    let mut next = 0usize;
    while best.evaluated < wanted && next < cap {
        let batch = (wanted - best.evaluated).min(cap - next);
        let values: Vec<Option<f64>> = (next..next + batch)
            .into_par_iter()
            .map_init(&init, |state, j| {
                let x = domain.point(j as u64);
                match f(state, &x) {
                    Ok(v) if v.is_finite() => Some(v.abs()),
                    _ => None,
                }
            })
            .collect();
        for (offset, v) in values.into_iter().enumerate() {
            match v {
                Some(v) => {
                    if best.argmax.is_empty() || v > best.max_abs {
                        best.max_abs = v;
                        best.argmax = domain.point((next + offset) as u64);
                    }
                    best.evaluated += 1;
                }
                None => best.skipped += 1,
            }
        }
        next += batch;
    }
    if best.evaluated < wanted {
        return Err(Error::DomainTooSingular {
            failed: best.skipped,
            attempted: best.skipped + best.evaluated,
        });
    }
    Ok(best)
}

/// Outcome of [`is_zero_sampled`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTest {
    pub verdict: bool,
    pub max_abs: f64,
    /// Point of largest magnitude, reported only when the test fails.
    pub witness: Option<Vec<f64>>,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Decides `e ≡ 0` on `domain` by sampling: true iff `max |e| ≤ tol`.
/// Values are computed with [`Tape::eval_extended_with`], so large terms that
/// cancel do not leave `f64` rounding noise behind.
pub fn is_zero_sampled(e: &Expr, domain: &Domain, tol: f64) -> Result<ZeroTest> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    // literal zeros need no sampling
    if e.is_zero() {
        return Ok(ZeroTest {
            verdict: true,
            max_abs: 0.0,
            witness: None,
            evaluated: domain.samples,
            skipped: 0,
        });
    }
    let tape = Tape::compile(e);
    let m = sample_max_with(domain, Vec::new, |buf, x| tape.eval_extended_with(x, buf))?;
    let verdict = m.max_abs <= tol;
    Ok(ZeroTest {
        verdict,
        max_abs: m.max_abs,
        witness: (!verdict).then_some(m.argmax),
        evaluated: m.evaluated,
        skipped: m.skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn points_lie_in_domain_and_are_reproducible() {
        let d = Domain::new(vec![(2.0, 3.0), (-1.0, 0.0)], 10, 7).unwrap();
        for j in 0..100 {
            let p = d.point(j);
            assert!((2.0..=3.0).contains(&p[0]) && (-1.0..=0.0).contains(&p[1]));
            assert_eq!(p, d.point(j));
        }
        assert_ne!(d.point(0), d.with_seed(8).point(0));
    }

    #[test]
    fn invalid_domains_rejected() {
        assert!(Domain::new(vec![(1.0, 1.0)], 10, 0).is_err());
        assert!(Domain::new(vec![(0.0, 1.0)], 0, 0).is_err());
        assert!(Domain::new(vec![(0.0, f64::INFINITY)], 1, 0).is_err());
    }

    #[test]
    fn difference_of_distinct_variables_is_not_zero() {
        let d = Domain::cube(2, 0.0, 1.0).unwrap();
        let t = is_zero_sampled(&parse_expr("x1 - x2", 2).unwrap(), &d, 1e-9).unwrap();
        assert!(!t.verdict);
        let w = t.witness.unwrap();
        assert!(((w[0] - w[1]).abs() - t.max_abs).abs() < 1e-15);
    }

    #[test]
    fn cancelled_quotient_is_zero() {
        let d = Domain::new(vec![(0.0, 1.0), (2.0, 3.0)], 500, 42).unwrap();
        let e = parse_expr("(x1 - x2)*(1/(x1 - x2)) - 1", 2).unwrap();
        let t = is_zero_sampled(&e, &d, 1e-12).unwrap();
        assert!(t.verdict && t.max_abs <= 1e-12);
        assert!(t.witness.is_none());
    }

    #[test]
    fn singular_points_are_skipped() {
        // log is undefined on half the square
        let d = Domain::cube(1, -1.0, 1.0).unwrap();
        let t = is_zero_sampled(&parse_expr("log(x1) - log(x1)", 1).unwrap(), &d, 1e-12).unwrap();
        assert!(t.verdict);
        assert_eq!(t.evaluated, 500);
        assert!(t.skipped > 0);
    }

    #[test]
    fn mostly_singular_domain_is_reported() {
        let d = Domain::cube(1, -1.0, 0.05).unwrap();
        let err = is_zero_sampled(&parse_expr("log(x1)", 1).unwrap(), &d, 1e-12).unwrap_err();
        assert!(matches!(err, Error::DomainTooSingular { .. }));
    }

    #[test]
    fn result_independent_of_thread_count() {
        let e = parse_expr("sin(3*x1)*x2 - x2^3", 2).unwrap();
        let d = Domain::cube(2, -1.0, 1.0).unwrap();
        let a = is_zero_sampled(&e, &d, 1e-9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| is_zero_sampled(&e, &d, 1e-9).unwrap());
        assert_eq!(a, b);
    }
}
