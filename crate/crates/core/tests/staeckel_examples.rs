//! Worked examples for Stäckel matrices, Hamiltonians, brackets and the
//! classical-level checks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use staeckel::gallery::{by_name, identity_case, list};
use staeckel::operators::testfns::random_axis_functions;
use staeckel::staeckel::{
    check_benenti, check_identity_eq6, check_involution, check_involution_with_potentials,
    cofactor_pair_quotient, eq6_expression, hamiltonians, poisson_bracket, potentials,
};
use staeckel::{is_zero_sampled, parse_expr, Domain, Error, Expr, Hamiltonian, StaeckelMatrix};

fn vdm2() -> StaeckelMatrix {
    StaeckelMatrix::parse(&[&["x1", "1"], &["x2", "1"]]).unwrap()
}

fn vdm2_domain() -> Domain {
    Domain::new(vec![(2.0, 3.0), (4.0, 5.0)], 500, 42).unwrap()
}

#[test]
fn determinant_examples() {
    let d = Domain::cube(2, -1.0, 1.0).unwrap();
    let one = StaeckelMatrix::identity(2).determinant();
    let dom = vdm2_domain();
    for k in 0..100 {
        assert_eq!(one.eval(&d.point(k)).unwrap(), 1.0);
        let x = dom.point(k);
        assert!((vdm2().determinant().eval(&x).unwrap() - (x[0] - x[1])).abs() < 1e-14);
    }
    let equal_rows =
        StaeckelMatrix::parse(&[&["2", "3", "-1"], &["t", "t^2", "1"], &["2", "3", "-1"]]).unwrap();
    let det = equal_rows.determinant();
    for k in 0..50 {
        assert!(
            det.eval(&Domain::cube(3, -1.0, 1.0).unwrap().point(k))
                .unwrap()
                .abs()
                <= 1e-14
        );
    }
}

#[test]
fn cofactor_examples() {
    let s = StaeckelMatrix::identity(3);
    for alpha in 0..3 {
        for i in 0..3 {
            let c = s.cofactor(alpha, i).simplify();
            assert_eq!(c.as_const(), Some(if alpha == i { 1.0 } else { 0.0 }));
        }
    }
    // numeric comatrix of [[x1, 1], [x2, 1]]: adj = [[1, −1], [−x2, x1]]
    let dom = vdm2_domain();
    let s = vdm2();
    for k in 0..100 {
        let x = dom.point(k);
        let want = [[1.0, -1.0], [-x[1], x[0]]];
        for (alpha, row) in want.iter().enumerate() {
            for (i, w) in row.iter().enumerate() {
                let got = s.cofactor(alpha, i).eval(&x).unwrap();
                assert!((got - w).abs() <= 1e-12 * w.abs().max(1.0));
            }
        }
    }
}

#[test]
fn hamiltonian_examples() {
    for n in 1..=4 {
        let d = Domain::cube(n, 0.0, 1.0).unwrap();
        for (alpha, h) in hamiltonians(&StaeckelMatrix::identity(n), &d)
            .unwrap()
            .iter()
            .enumerate()
        {
            for i in 0..n {
                assert_eq!(
                    h.coeff(i).simplify().as_const(),
                    Some(if i == alpha { 1.0 } else { 0.0 })
                );
            }
        }
    }
    let dom = vdm2_domain();
    let hams = hamiltonians(&vdm2(), &dom).unwrap();
    for k in 0..100 {
        let x = dom.point(k);
        let p = [0.3 - 0.01 * k as f64, 0.7];
        let den = x[0] - x[1];
        let h1 = (p[0] * p[0] - p[1] * p[1]) / den;
        let h2 = (x[0] * p[1] * p[1] - x[1] * p[0] * p[0]) / den;
        assert!((hams[0].evaluate(&x, &p).unwrap() - h1).abs() < 1e-12);
        assert!((hams[1].evaluate(&x, &p).unwrap() - h2).abs() < 1e-12);
    }
}

/// Row-local 3×3 matrices with random cubic entries plus a dominant diagonal.
fn random_polynomial_matrix(seed: u64) -> (StaeckelMatrix, Domain) {
    let dom = Domain::cube(3, -1.0, 1.0).unwrap().with_seed(seed);
    let mut rng = dom.rng(7);
    let entries = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.3..0.3)).collect();
                    let diag = if i == j { 4.0 } else { 0.0 };
                    let t = Expr::var(i);
                    Expr::sum([
                        Expr::constant(c[0] + diag),
                        Expr::constant(c[1]) * t.clone(),
                        Expr::constant(c[2]) * t.clone().powi(2),
                        Expr::constant(c[3]) * t.powi(3),
                    ])
                })
                .collect()
        })
        .collect();
    (StaeckelMatrix::new(entries).unwrap(), dom)
}

fn reconstruction_error(s: &StaeckelMatrix, hams: &[Hamiltonian], x: &[f64], p: &[f64]) -> f64 {
    let m = s.evaluate(x).unwrap();
    let n = s.dim();
    (0..n)
        .map(|i| {
            let sum: f64 = (0..n)
                .map(|a| m[i][a] * hams[a].evaluate(x, p).unwrap())
                .sum();
            (sum - p[i] * p[i]).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn random_polynomial_matrices_reconstruct_momenta() {
    for seed in 0..3 {
        let (s, dom) = random_polynomial_matrix(seed);
        let hams = hamiltonians(&s, &dom).unwrap();
        let mut rng = dom.rng(8);
        for k in 0..500 {
            let x = dom.point(k);
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.577..0.577)).collect();
            assert!(reconstruction_error(&s, &hams, &x, &p) <= 1e-10);
        }
    }
}

#[test]
fn cramer_reconstruction_for_every_gallery_case() {
    for (family, _) in list() {
        let name = family.trim_end_matches(":N");
        for dim in [2, 3] {
            let c = by_name(&format!("{name}:{dim}")).unwrap();
            let hams = hamiltonians(&c.matrix, &c.domain).unwrap();
            let mut rng = c.domain.rng(11);
            for k in 0..500 {
                let x = c.domain.point(k);
                let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let err = reconstruction_error(&c.matrix, &hams, &x, &p);
                assert!(err <= 1e-10, "{name}:{dim}: {err}");
            }
        }
    }
}

#[test]
fn potential_examples() {
    let dom = vdm2_domain();
    let zero = [Expr::zero(), Expr::zero()];
    for u in potentials(&vdm2(), &zero, &dom).unwrap() {
        assert!(is_zero_sampled(&u, &dom, 1e-300).unwrap().verdict);
    }
    let d3 = Domain::cube(3, -1.0, 1.0).unwrap();
    let v: Vec<Expr> = ["sin(x1)", "x2^3", "exp(x3)"]
        .iter()
        .map(|t| parse_expr(t, 3).unwrap())
        .collect();
    let us = potentials(&StaeckelMatrix::identity(3), &v, &d3).unwrap();
    for (u, va) in us.iter().zip(&v) {
        assert!(
            is_zero_sampled(&(u.clone() - va.clone()), &d3, 1e-15)
                .unwrap()
                .verdict
        );
    }
    let v = [
        parse_expr("x1^2", 2).unwrap(),
        parse_expr("x2^2", 2).unwrap(),
    ];
    let us = potentials(&vdm2(), &v, &dom).unwrap();
    for k in 0..500 {
        let x = dom.point(k);
        let m = DMatrix::from_row_slice(2, 2, &[x[0], 1.0, x[1], 1.0]);
        let u = DVector::from_fn(2, |a, _| us[a].eval(&x).unwrap());
        let rhs = DVector::from_vec(vec![x[0] * x[0], x[1] * x[1]]);
        assert!((m * u - rhs).amax() <= 1e-10);
    }
}

#[test]
fn bracket_examples() {
    let p1 = Hamiltonian::kinetic(vec![Expr::one(), Expr::zero()]);
    let p2 = Hamiltonian::kinetic(vec![Expr::zero(), Expr::one()]);
    assert!(poisson_bracket(&p1, &p2).simplify().is_zero());

    let x1 = Hamiltonian::potential_only(2, Expr::var(0));
    let b = poisson_bracket(&p1, &x1).simplify();
    assert_eq!(b.degree(), 1);
    assert_eq!(b.coefficient(&[1, 0]).and_then(Expr::as_const), Some(2.0));
    assert_eq!(b.terms().count(), 1);
}

#[test]
fn bracket_is_antisymmetric() {
    for name in ["vandermonde:3", "power_law:3", "rescaled_vandermonde:2"] {
        let c = by_name(name).unwrap();
        let mut rng = c.domain.rng(3);
        let v = random_axis_functions(c.domain.intervals(), 3, &mut rng);
        let us = potentials(&c.matrix, &v, &c.domain).unwrap();
        let hams: Vec<_> = hamiltonians(&c.matrix, &c.domain)
            .unwrap()
            .iter()
            .zip(us)
            .map(|(h, u)| h.with_potential(u))
            .collect();
        let sum = poisson_bracket(&hams[0], &hams[1])
            .add(&poisson_bracket(&hams[1], &hams[0]))
            .simplify();
        for (_, coeff) in sum.terms() {
            assert!(
                is_zero_sampled(coeff, &c.domain, 1e-12).unwrap().verdict,
                "{name}"
            );
        }
    }
}

#[test]
fn involution_examples() {
    for n in 2..=4 {
        let c = identity_case(n).unwrap();
        let r = check_involution(&c.matrix, &c.domain, 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_residual, 0.0);
    }
    let c = by_name("vandermonde:3").unwrap();
    let r = check_involution(&c.matrix, &c.domain, 1e-9).unwrap();
    assert!(r.passed() && r.max_residual <= 1e-9, "{r:?}");

    // S_12 replaced by a function of x2
    let mut rows = c.matrix.rows().to_vec();
    rows[0][1] = parse_expr("x2^2", 3).unwrap();
    let bad = StaeckelMatrix::new_unchecked(rows).unwrap();
    match check_involution(&bad, &c.domain, 1e-9) {
        Err(Error::RowLocality {
            row: 0,
            col: 1,
            var: 1,
        }) => {}
        other => panic!("expected a row-locality error, got {other:?}"),
    }
}

#[test]
fn every_gallery_case_is_in_involution_with_potentials() {
    for (family, _) in list() {
        let name = family.trim_end_matches(":N");
        for n in [2, 3] {
            let c = by_name(&format!("{name}:{n}")).unwrap();
            let mut rng = c.domain.rng(21);
            let v = random_axis_functions(c.domain.intervals(), 3, &mut rng);
            let r = check_involution_with_potentials(&c.matrix, &v, &c.domain, 1e-9).unwrap();
            assert!(r.passed(), "{name}:{n}: {}", r.max_residual);
        }
    }
}

#[test]
fn cofactor_quotient_is_one_in_two_dimensions() {
    for name in [
        "vandermonde:2",
        "power_law:2",
        "rescaled_vandermonde:2",
        "vandermonde_cubic:2",
    ] {
        let c = by_name(name).unwrap();
        let adj = c.matrix.adjugate();
        let q = cofactor_pair_quotient(&adj, 0, 1, 0, 1);
        for k in 0..100 {
            let v = q.eval(&c.domain.point(k)).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{name}: {v}");
        }
        let r = check_identity_eq6(&c.matrix, &c.domain, 1e-8).unwrap();
        assert!(r.passed(), "{name}");
    }
}

#[test]
fn eq6_examples() {
    for n in 2..=4 {
        let c = identity_case(n).unwrap();
        assert_eq!(
            check_identity_eq6(&c.matrix, &c.domain, 1e-8)
                .unwrap()
                .max_residual,
            0.0
        );
    }
    let c = by_name("vandermonde:3").unwrap();
    let r = check_identity_eq6(&c.matrix, &c.domain, 1e-8).unwrap();
    assert!(r.passed());
    assert_eq!(r.findings.len(), 3 * 9);

    // one tuple against a central difference of the quotient
    let adj = c.matrix.adjugate();
    let (a, b, i, j) = (0, 2, 1, 0);
    let q = cofactor_pair_quotient(&adj, a, b, i, j);
    let e = eq6_expression(&adj, a, b, i, j);
    let h = 1e-5;
    for k in 0..20 {
        let x = c.domain.point(k);
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += h;
        xm[i] -= h;
        let fd = (q.eval(&xp).unwrap() - q.eval(&xm).unwrap()) / (2.0 * h);
        assert!(fd.abs() < 1e-6 && e.eval(&x).unwrap().abs() < 1e-8);
    }
    // a non-identity derivative: the same quotient differentiated in x_j
    let fd_j = {
        let x = c.domain.point(0);
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[j] += h;
        xm[j] -= h;
        (q.eval(&xp).unwrap() - q.eval(&xm).unwrap()) / (2.0 * h)
    };
    assert!((q.diff(j).eval(&c.domain.point(0)).unwrap() - fd_j).abs() < 1e-6);
}

#[test]
fn benenti_examples() {
    let c = by_name("vandermonde:3").unwrap();
    let hams = hamiltonians(&c.matrix, &c.domain).unwrap();
    let r = check_benenti(&hams[0], &hams[1], &c.domain, 1e-9).unwrap();
    assert_eq!(r.max_residual, 0.0);

    let mut rng = c.domain.rng(4);
    let v = random_axis_functions(c.domain.intervals(), 3, &mut rng);
    let us = potentials(&c.matrix, &v, &c.domain).unwrap();
    let with: Vec<_> = hams
        .iter()
        .zip(&us)
        .map(|(h, u)| h.with_potential(u.clone()))
        .collect();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        assert!(check_benenti(&with[a], &with[b], &c.domain, 1e-9)
            .unwrap()
            .passed());
    }
    // s = 1 by central differences at one point
    let x = c.domain.point(3);
    let h = 1e-5;
    let d1 = |u: &Expr| {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[0] += h;
        xm[0] -= h;
        (u.eval(&xp).unwrap() - u.eval(&xm).unwrap()) / (2.0 * h)
    };
    let fd = with[0].coeff(0).eval(&x).unwrap() * d1(&us[1])
        - with[1].coeff(0).eval(&x).unwrap() * d1(&us[0]);
    assert!(fd.abs() < 1e-6);

    // identity(2) with V = (x1², x2²) and U_β replaced by x1·x2:
    // s = 1 reads 1·∂₁(x1x2) − 0·∂₁(x1²) = x2, which is 1 at (1, 1)
    let c = identity_case(2).unwrap();
    let ha = Hamiltonian::new(
        vec![Expr::one(), Expr::zero()],
        parse_expr("x1^2", 2).unwrap(),
    );
    let hb = Hamiltonian::new(
        vec![Expr::zero(), Expr::one()],
        parse_expr("x1*x2", 2).unwrap(),
    );
    let s1 =
        ha.coeff(0).clone() * hb.potential().diff(0) - hb.coeff(0).clone() * ha.potential().diff(0);
    assert_eq!(s1.eval(&[1.0, 1.0]).unwrap(), 1.0);
    let r = check_benenti(&ha, &hb, &c.domain, 1e-9).unwrap();
    assert!(!r.passed());
    let f = r.finding("s=1").unwrap();
    assert!(f.residual > 0.5 && f.witness.is_some());
}
