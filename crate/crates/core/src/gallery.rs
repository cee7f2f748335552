//! Named Stäckel matrices with canonical domains, and the coordinate rescaling
//! `x̂_i = f_i(x_i)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Expr, InverseMap, Parser, Tape};
use crate::report::{Report, ReportBuilder};
use crate::sampling::{sample_max_with, Domain};
use crate::staeckel::{hamiltonians, StaeckelMatrix, DEFAULT_DET_EPS, MAX_DIM};

/// A Stäckel matrix together with a domain on which it is nondegenerate.
#[derive(Debug, Clone)]
pub struct GalleryCase {
    pub name: String,
    pub matrix: StaeckelMatrix,
    pub domain: Domain,
    pub potential: Option<Vec<Expr>>,
    pub notes: String,
}

impl GalleryCase {
    pub fn with_potential(mut self, v: Vec<Expr>) -> Self {
        self.potential = Some(v);
        self
    }

    /// Row-locality and sampled nondegeneracy.
    pub fn validate(&self) -> Result<()> {
        self.matrix.check_row_locality()?;
        self.matrix
            .check_nondegenerate(&self.domain, DEFAULT_DET_EPS)
    }
}

/// Parses a univariate map written in `t`.
pub fn parse_univariate(text: &str) -> Result<Expr> {
    Parser::new(1).alias("t", 0).parse(text)
}

fn check_dim(n: usize, min: usize) -> Result<()> {
    if !(min..=MAX_DIM).contains(&n) {
        return Err(Error::DimensionOutOfRange {
            n,
            min,
            max: MAX_DIM,
        });
    }
    Ok(())
}

/// One map per axis; a single map is used on every axis.
fn per_axis(n: usize, f: &[Expr]) -> Result<Vec<Expr>> {
    match f.len() {
        1 => Ok(vec![f[0].clone(); n]),
        k if k == n => Ok(f.to_vec()),
        k => Err(Error::DimensionMismatch(format!(
            "expected 1 or {n} maps, got {k}"
        ))),
    }
    .and_then(|fs| {
        for (i, g) in fs.iter().enumerate() {
            if g.variables().iter().any(|&k| k != 0) {
                return Err(Error::InvalidArgument(format!(
                    "map for axis {} must be univariate in t",
                    i + 1
                )));
            }
        }
        Ok(fs)
    })
}

/// `[2i, 2i+1]` for axis `i = 1..n`.
fn staggered_domain(n: usize) -> Result<Domain> {
    let intervals = (1..=n)
        .map(|i| (2.0 * i as f64, 2.0 * i as f64 + 1.0))
        .collect();
    Domain::new(
        intervals,
        crate::sampling::DEFAULT_SAMPLES,
        crate::sampling::DEFAULT_SEED,
    )
}

fn map_label(fs: &[Expr]) -> String {
    if fs.iter().all(|g| *g == Expr::var(0)) {
        String::new()
    } else if fs.iter().all(|g| g == &fs[0]) {
        format!("[f={}]", fs[0])
    } else {
        let parts: Vec<String> = fs.iter().map(|g| g.to_string()).collect();
        format!("[f=({})]", parts.join("; "))
    }
}

fn power_matrix(fs: &[Expr], gamma: &[i32]) -> Result<StaeckelMatrix> {
    let entries = fs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let gi = g.on_axis(i);
            gamma.iter().map(|&k| gi.clone().powi(k)).collect()
        })
        .collect();
    StaeckelMatrix::new(entries)
}

/// `S_ij = f_i(x_i)^(n-j)` for `j = 1..n`, on `x_i ∈ [2i, 2i+1]`.
pub fn vandermonde(n: usize, f: &[Expr]) -> Result<GalleryCase> {
    check_dim(n, 2)?;
    let fs = per_axis(n, f)?;
    let gamma: Vec<i32> = (0..n as i32).rev().collect();
    Ok(GalleryCase {
        name: format!("vandermonde:{n}{}", map_label(&fs)),
        matrix: power_matrix(&fs, &gamma)?,
        domain: staggered_domain(n)?,
        potential: None,
        notes: "Vandermonde matrix in f_i(x_i)".into(),
    })
}

/// `S_ij = f_i(x_i)^γ_j` with mutually different integer exponents, on
/// `x_i ∈ [2i, 2i+1]`. `γ = (n-1, …, 0)` gives [`vandermonde`].
pub fn power_law(n: usize, f: &[Expr], gamma: &[i32]) -> Result<GalleryCase> {
    check_dim(n, 1)?;
    if gamma.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} exponents, got {}",
            gamma.len()
        )));
    }
    for (k, g) in gamma.iter().enumerate() {
        if gamma[..k].contains(g) {
            return Err(Error::DuplicateExponents(*g));
        }
    }
    let fs = per_axis(n, f)?;
    let list: Vec<String> = gamma.iter().map(|g| g.to_string()).collect();
    Ok(GalleryCase {
        name: format!("power_law:{n}({}){}", list.join(","), map_label(&fs)),
        matrix: power_matrix(&fs, gamma)?,
        domain: staggered_domain(n)?,
        potential: None,
        notes: "power-law matrix".into(),
    })
}

/// `γ_k = k(k+3)/2`, i.e. `(0, 2, 5, 9, …)`.
pub fn default_exponents(n: usize) -> Vec<i32> {
    (0..n as i32).map(|k| k * (k + 3) / 2).collect()
}

/// `S = I` on `[0, 1]^n`.
pub fn identity_case(n: usize) -> Result<GalleryCase> {
    check_dim(n, 1)?;
    Ok(GalleryCase {
        name: format!("identity:{n}"),
        matrix: StaeckelMatrix::identity(n),
        domain: Domain::cube(n, 0.0, 1.0)?,
        potential: None,
        notes: "identity matrix, decoupled free motion".into(),
    })
}

const MONOTONE_SAMPLES: usize = 257;

/// Requires `f'` to keep a strict sign on `[lo, hi]`, checked on a uniform grid.
fn check_monotone(f: &Expr, lo: f64, hi: f64, axis: usize) -> Result<()> {
    let d = Tape::compile(&f.diff(0));
    let mut buf = Vec::new();
    let mut sign = 0.0;
    for k in 0..MONOTONE_SAMPLES {
        let t = lo + (hi - lo) * k as f64 / (MONOTONE_SAMPLES - 1) as f64;
        let v = d.eval_with(&[t], &mut buf)?;
        if v == 0.0 || !v.is_finite() || (sign != 0.0 && v.signum() != sign) {
            return Err(Error::NonMonotone { axis });
        }
        sign = v.signum();
    }
    Ok(())
}

/// New coordinates `x̂_i = f_i(x_i)`. Row `i` is recomposed with the numerical
/// inverse of `f_i`, so it still depends on `x̂_i` only; the domain becomes the
/// image box.
pub fn rescale(case: &GalleryCase, f: &[Expr]) -> Result<GalleryCase> {
    let n = case.matrix.dim();
    let fs = per_axis(n, f)?;
    let mut rows = Vec::with_capacity(n);
    let mut intervals = Vec::with_capacity(n);
    for (i, g) in fs.iter().enumerate() {
        let (lo, hi) = case.domain.interval(i);
        let row = case.matrix.rows()[i].clone();
        if *g == Expr::var(0) {
            rows.push(row);
            intervals.push((lo, hi));
            continue;
        }
        check_monotone(g, lo, hi, i)?;
        let (a, b) = (g.eval(&[lo])?, g.eval(&[hi])?);
        intervals.push((a.min(b), a.max(b)));
        let map = Arc::new(InverseMap::new(g.clone(), lo, hi)?);
        let back = Expr::inverse(map, Expr::var(i));
        rows.push(row.iter().map(|e| e.substitute(i, &back)).collect());
    }
    let domain = Domain::new(intervals, case.domain.samples(), case.domain.seed())?;
    let potential = case.potential.as_ref().map(|v| {
        v.iter()
            .enumerate()
            .map(|(i, e)| {
                let (lo, hi) = case.domain.interval(i);
                if fs[i] == Expr::var(0) {
                    return e.clone();
                }
                let map = Arc::new(InverseMap::new(fs[i].clone(), lo, hi).expect("checked above"));
                e.substitute(i, &Expr::inverse(map, Expr::var(i)))
            })
            .collect()
    });
    Ok(GalleryCase {
        name: format!("rescaled({}){}", case.name, map_label(&fs)),
        matrix: StaeckelMatrix::new(rows)?,
        domain,
        potential,
        notes: format!("{} after x̂_i = f_i(x_i)", case.notes),
    })
}

const FACTORIZATION_PAIRS: usize = 100;

/// Samples `R(x) = φ_new(f(x)) Π f_i'(x_i) / φ_old(x)` and checks that `log |R|`
/// has vanishing mixed second differences, i.e. that `R` is a product of
/// one-variable functions. Residuals are reported per axis pair.
pub fn check_volume_factorization(
    old: &GalleryCase,
    new: &GalleryCase,
    f: &[Expr],
    tol: f64,
) -> Result<Report> {
    let n = old.matrix.dim();
    let fs = per_axis(n, f)?;
    let phi_old = Tape::compile(&old.matrix.determinant());
    let phi_new = Tape::compile(&new.matrix.determinant());
    let maps: Vec<Tape> = fs.iter().map(Tape::compile).collect();
    let jac: Vec<Tape> = fs.iter().map(|g| Tape::compile(&g.diff(0))).collect();
    let log_ratio = |x: &[f64], buf: &mut Vec<f64>| -> std::result::Result<f64, crate::EvalError> {
        let mut xh = Vec::with_capacity(n);
        let mut j = 1.0;
        for i in 0..n {
            xh.push(maps[i].eval_with(&[x[i]], buf)?);
            j *= jac[i].eval_with(&[x[i]], buf)?;
        }
        let r = phi_new.eval_with(&xh, buf)? * j / phi_old.eval_with(x, buf)?;
        Ok(r.abs().ln())
    };
    let mut report = ReportBuilder::new("volume-factorization", tol);
    let pairs = Domain::new(
        old.domain
            .intervals()
            .iter()
            .chain(old.domain.intervals())
            .copied()
            .collect(),
        FACTORIZATION_PAIRS,
        old.domain.seed(),
    )?;
    for a in 0..n {
        for b in a + 1..n {
            let m = sample_max_with(&pairs, Vec::new, |buf, xy| {
                let (x, y) = xy.split_at(n);
                let mut xa = x.to_vec();
                xa[a] = y[a];
                let mut xb = x.to_vec();
                xb[b] = y[b];
                let mut xab = xa.clone();
                xab[b] = y[b];
                Ok(
                    log_ratio(x, buf)? - log_ratio(&xa, buf)? - log_ratio(&xb, buf)?
                        + log_ratio(&xab, buf)?,
                )
            })?;
            report.push(
                format!("axes {},{}", a + 1, b + 1),
                m.max_abs,
                Some(m.argmax[..n].to_vec()),
            );
        }
    }
    if n == 1 {
        report.push("single axis", 0.0, None);
    }
    Ok(report.finish())
}

/// `|φ|` against `√|det g|` with `g⁻¹ = diag(H^{ii}_(1))`, as a relative
/// difference.
pub fn check_metric(case: &GalleryCase, tol: f64) -> Result<Report> {
    let hams = hamiltonians(&case.matrix, &case.domain)?;
    let coeffs: Vec<Tape> = hams[0].coeffs().iter().map(Tape::compile).collect();
    let phi = Tape::compile(&case.matrix.determinant());
    let m = sample_max_with(&case.domain, Vec::new, |buf, x| {
        let mut inv_det = 1.0;
        for c in &coeffs {
            inv_det *= c.eval_with(x, buf)?;
        }
        let root = (1.0 / inv_det.abs()).sqrt();
        let p = phi.eval_with(x, buf)?.abs();
        Ok((p - root) / p)
    })?;
    let mut report = ReportBuilder::new("metric", tol);
    report.push("|φ| vs √|det g|", m.max_abs, Some(m.argmax));
    Ok(report.finish())
}

/// Names accepted by [`by_name`], with a description.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        ("identity:N", "S = I on [0,1]^N, N = 1..6"),
        (
            "vandermonde:N",
            "S_ij = x_i^(N-j) on x_i in [2i, 2i+1], N = 2..6",
        ),
        (
            "vandermonde_cubic:N",
            "Vandermonde in f(x_i) = x_i + x_i^3/10, N = 2..6",
        ),
        (
            "power_law:N",
            "S_ij = x_i^g_j with g = (0, 2, 5, 9, ...), N = 1..6",
        ),
        (
            "rescaled_vandermonde:N",
            "vandermonde:N in coordinates x^_i = x_i + x_i^3/10, N = 2..6",
        ),
    ]
}

/// Looks up a case such as `vandermonde:3`.
pub fn by_name(spec: &str) -> Result<GalleryCase> {
    let (family, n) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("expected FAMILY:N, got `{spec}`")))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad dimension in `{spec}`")))?;
    let t = Expr::var(0);
    let cubic = || parse_univariate("t + t^3/10").expect("valid literal");
    match family.trim() {
        "identity" => identity_case(n),
        "vandermonde" => vandermonde(n, &[t]),
        "vandermonde_cubic" => vandermonde(n, &[cubic()]),
        "power_law" => power_law(n, &[t], &default_exponents(n)),
        "rescaled_vandermonde" => rescale(&vandermonde(n, &[t])?, &[cubic()]),
        other => Err(Error::InvalidArgument(format!(
            "unknown gallery family `{other}`"
        ))),
    }
    .map(|mut case| {
        case.name = spec.trim().to_string();
        case
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{check_commutation, quantize};
    use crate::staeckel::{check_identity_eq6, check_involution};

    #[test]
    fn vandermonde_two() {
        let c = vandermonde(2, &[Expr::var(0)]).unwrap();
        assert_eq!(c.matrix.entry(0, 0), &Expr::var(0));
        assert_eq!(c.matrix.entry(1, 0), &Expr::var(1));
        assert!(c.matrix.entry(0, 1).is_one() && c.matrix.entry(1, 1).is_one());
        assert_eq!(c.domain.intervals(), &[(2.0, 3.0), (4.0, 5.0)]);
        assert!(matches!(
            vandermonde(1, &[Expr::var(0)]),
            Err(Error::DimensionOutOfRange { .. })
        ));
        assert!(matches!(
            vandermonde(7, &[Expr::var(0)]),
            Err(Error::DimensionOutOfRange { .. })
        ));
    }

    #[test]
    fn power_law_reproduces_vandermonde() {
        let t = [Expr::var(0)];
        let v = vandermonde(4, &t).unwrap();
        let p = power_law(4, &t, &[3, 2, 1, 0]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(
                    v.matrix.entry(i, j).simplify(),
                    p.matrix.entry(i, j).simplify()
                );
            }
        }
        assert!(matches!(
            power_law(3, &t, &[0, 2, 0]),
            Err(Error::DuplicateExponents(0))
        ));
        assert_eq!(default_exponents(3), vec![0, 2, 5]);
    }

    #[test]
    fn every_named_case_is_valid() {
        for name in [
            "identity:1",
            "identity:4",
            "vandermonde:2",
            "vandermonde:5",
            "vandermonde_cubic:3",
            "power_law:3",
            "rescaled_vandermonde:2",
        ] {
            let c = by_name(name).unwrap();
            c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(c.name, name);
        }
        assert!(by_name("nope:2").is_err());
        assert!(by_name("identity").is_err());
        assert!(by_name("identity:x").is_err());
    }

    #[test]
    fn rescale_by_identity_is_a_no_op() {
        let c = vandermonde(3, &[Expr::var(0)]).unwrap();
        let r = rescale(&c, &[Expr::var(0)]).unwrap();
        assert_eq!(r.matrix, c.matrix);
        assert_eq!(r.domain.intervals(), c.domain.intervals());
    }

    #[test]
    fn rescale_rejects_non_monotone_maps() {
        let c = identity_case(2).unwrap();
        let bad = parse_univariate("(t - 1/2)^2").unwrap();
        assert!(matches!(
            rescale(&c, &[bad]),
            Err(Error::NonMonotone { axis: 0 })
        ));
    }

    #[test]
    fn doubling_identity_gives_constant_ratio() {
        let c = identity_case(2).unwrap();
        let f = [parse_univariate("2*t").unwrap()];
        let r = rescale(&c, &f).unwrap();
        assert_eq!(r.domain.intervals(), &[(0.0, 2.0), (0.0, 2.0)]);
        let rep = check_volume_factorization(&c, &r, &f, 1e-8).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn rescaled_vandermonde_keeps_stackel_structure() {
        let c = vandermonde(2, &[Expr::var(0)]).unwrap();
        let f = [parse_univariate("t + t^3/10").unwrap()];
        let r = rescale(&c, &f).unwrap();
        // x̂_1 = f(2.5) maps back to 2.5
        let x = [f[0].eval(&[2.5]).unwrap(), f[0].eval(&[4.5]).unwrap()];
        assert!((r.matrix.entry(0, 0).eval(&x).unwrap() - 2.5).abs() < 1e-13);
        let rep = check_volume_factorization(&c, &r, &f, 1e-8).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let ops = quantize(&r.matrix, &r.domain).unwrap();
        assert!(check_commutation(&ops, &r.domain, 1e-8).unwrap().passed());
        assert!(check_involution(&r.matrix, &r.domain, 1e-9)
            .unwrap()
            .passed());
        assert!(check_identity_eq6(&r.matrix, &r.domain, 1e-8)
            .unwrap()
            .passed());
    }

    #[test]
    fn metric_matches_determinant() {
        for n in 2..=4 {
            let c = vandermonde(n, &[Expr::var(0)]).unwrap();
            let rep = check_metric(&c, 1e-10).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }
}
