//! Quantized Stäckel operators: structure, potentials, composition,
//! commutation and symmetry under the weight `φ = det S`.

use staeckel::gallery::{by_name, identity_case};
use staeckel::operators::testfns::{bump, random_axis_functions, random_polynomial};
use staeckel::operators::{
    add_potential, check_commutation, check_divergence_form, check_potential_grouping,
    check_self_adjoint, quantize, quantize_with_potentials, symmetry_defect, QuadratureSpec,
};
use staeckel::staeckel::{eq6_expression, hamiltonians};
use staeckel::{is_zero_sampled, parse_expr, DiffOp, Domain, Error, Expr};

fn sq(n: usize, i: usize) -> Vec<u8> {
    let mut m = vec![0; n];
    m[i] = 2;
    m
}

#[test]
fn quantized_operators_are_diagonal_second_order() {
    for name in [
        "identity:3",
        "vandermonde:3",
        "vandermonde_cubic:3",
        "power_law:3",
        "rescaled_vandermonde:3",
    ] {
        let c = by_name(name).unwrap();
        let n = c.matrix.dim();
        let ops = quantize(&c.matrix, &c.domain).unwrap();
        let hams = hamiltonians(&c.matrix, &c.domain).unwrap();
        for (op, h) in ops.iter().zip(&hams) {
            assert_eq!(op.order(), 2);
            assert_eq!(op.terms_of_order(1).count(), 0, "{name}: first-order term");
            for (m, _) in op.terms_of_order(2) {
                assert!(m.iter().any(|&k| k == 2), "{name}: mixed term {m:?}");
            }
            // symbol equals the classical Hamiltonian
            for i in 0..n {
                let c2 = op
                    .coefficient(&sq(n, i))
                    .cloned()
                    .unwrap_or_else(Expr::zero)
                    .simplify();
                assert_eq!(c2, h.coeff(i).simplify(), "{name}: H^{i}{i}");
            }
            let sym = op.symbol();
            for i in 0..n {
                let mut p = vec![0u8; n];
                p[i] = 2;
                assert_eq!(
                    sym.coefficient(&p)
                        .cloned()
                        .unwrap_or_else(Expr::zero)
                        .simplify(),
                    h.coeff(i).simplify()
                );
            }
        }
    }
}

#[test]
fn quantize_examples() {
    let c = identity_case(3).unwrap();
    for (alpha, op) in quantize(&c.matrix, &c.domain).unwrap().iter().enumerate() {
        let op = op.simplify();
        assert_eq!(op.terms().count(), 1);
        assert_eq!(
            op.coefficient(&sq(3, alpha)).and_then(Expr::as_const),
            Some(1.0)
        );
    }
    let c = by_name("vandermonde:2").unwrap();
    let ops = quantize(&c.matrix, &c.domain).unwrap();
    for k in 0..100 {
        let x = c.domain.point(k);
        let r = 1.0 / (x[0] - x[1]);
        let c1 = ops[0].coefficient(&[2, 0]).unwrap().eval(&x).unwrap();
        let c2 = ops[0].coefficient(&[0, 2]).unwrap().eval(&x).unwrap();
        assert!((c1 - r).abs() < 1e-13 && (c2 + r).abs() < 1e-13);
    }
    for name in ["vandermonde:3", "power_law:3", "rescaled_vandermonde:2"] {
        let c = by_name(name).unwrap();
        assert!(
            check_divergence_form(&c.matrix, &c.domain, 1e-8)
                .unwrap()
                .passed(),
            "{name}"
        );
    }
}

#[test]
fn potential_examples() {
    let d = Domain::cube(2, -1.0, 1.0).unwrap();
    let dxx = DiffOp::partial(2, 0, 2);
    assert_eq!(add_potential(&dxx, &Expr::zero()).simplify(), dxx);

    let c = identity_case(2).unwrap();
    let v = [
        parse_expr("x1^2", 2).unwrap(),
        parse_expr("x2^2", 2).unwrap(),
    ];
    let ops = quantize_with_potentials(&c.matrix, &v, &c.domain).unwrap();
    let want = add_potential(&dxx, &v[0]);
    let f = parse_expr("sin(x1)*x2^3 + x1^4", 2).unwrap();
    let diff = ops[0].apply(&f) - want.apply(&f);
    assert!(is_zero_sampled(&diff, &d, 1e-14).unwrap().verdict);

    for name in ["vandermonde:2", "vandermonde:3", "power_law:3"] {
        let c = by_name(name).unwrap();
        let mut rng = c.domain.rng(1);
        let v = random_axis_functions(c.domain.intervals(), 3, &mut rng);
        let r = check_potential_grouping(&c.matrix, &v, &c.domain, 1e-10).unwrap();
        assert!(r.passed(), "{name}: {}", r.max_residual);
    }
}

#[test]
fn composition_is_associative_on_quartics() {
    let c = by_name("vandermonde:2").unwrap();
    let ops = quantize(&c.matrix, &c.domain).unwrap();
    let a = DiffOp::partial(2, 0, 1);
    let b = ops[1].clone();
    let x = DiffOp::multiplication(2, parse_expr("x1*x2^2", 2).unwrap());
    let left = a.compose(&b).unwrap().compose(&x).unwrap();
    let right = a.compose(&b.compose(&x).unwrap()).unwrap();
    let mut rng = c.domain.rng(2);
    for _ in 0..10 {
        let f = random_polynomial(2, 4, &c.domain.center(), &mut rng);
        let r = left.apply(&f) - right.apply(&f);
        assert!(is_zero_sampled(&r, &c.domain, 1e-10).unwrap().verdict);
    }
}

#[test]
fn application_is_linear() {
    let c = by_name("vandermonde:3").unwrap();
    let ops = quantize(&c.matrix, &c.domain).unwrap();
    let mut rng = c.domain.rng(3);
    let f = random_polynomial(3, 4, &c.domain.center(), &mut rng);
    let g = random_polynomial(3, 4, &c.domain.center(), &mut rng);
    for op in &ops {
        let r = op.apply(&(f.clone() + g.clone())) - op.apply(&f) - op.apply(&g);
        assert!(
            is_zero_sampled(&r.simplify(), &c.domain, 1e-12)
                .unwrap()
                .verdict
        );
    }
}

#[test]
fn apply_to_cosine_product() {
    for n in 1..=4 {
        let c = identity_case(n).unwrap();
        let f = Expr::product((0..n).map(|i| Expr::var(i).cos()));
        for op in quantize(&c.matrix, &c.domain).unwrap() {
            let r = op.apply(&f) + f.clone();
            assert!(is_zero_sampled(&r, &c.domain, 1e-15).unwrap().verdict);
        }
    }
    let z = DiffOp::zero(2);
    assert!(z
        .apply(&parse_expr("exp(x1*x2)", 2).unwrap())
        .simplify()
        .is_zero());
}

#[test]
fn third_order_part_of_commutator_matches_cofactor_identity() {
    for name in ["vandermonde:3", "power_law:3"] {
        let c = by_name(name).unwrap();
        let n = c.matrix.dim();
        let ops = quantize(&c.matrix, &c.domain).unwrap();
        let adj = c.matrix.adjugate();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let raw = ops[a]
                .compose(&ops[b])
                .unwrap()
                .sub(&ops[b].compose(&ops[a]).unwrap());
            for i in 0..n {
                for j in 0..n {
                    let mut m = vec![0u8; n];
                    m[i] += 1;
                    m[j] += 2;
                    let got = raw.coefficient(&m).cloned().unwrap_or_else(Expr::zero);
                    let want = if i == j {
                        Expr::zero()
                    } else {
                        Expr::constant(2.0)
                            * Expr::quotient(eq6_expression(&adj, a, b, i, j), adj.phi.clone())
                    };
                    let t = is_zero_sampled(&(got - want), &c.domain, 1e-8).unwrap();
                    assert!(t.verdict, "{name} ({a},{b}) i={i} j={j}: {}", t.max_abs);
                }
            }
        }
    }
}

#[test]
fn commutation_examples() {
    for n in 2..=4 {
        let c = identity_case(n).unwrap();
        let r =
            check_commutation(&quantize(&c.matrix, &c.domain).unwrap(), &c.domain, 1e-8).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }
    for name in ["power_law:3", "vandermonde:3", "rescaled_vandermonde:2"] {
        let c = by_name(name).unwrap();
        let r =
            check_commutation(&quantize(&c.matrix, &c.domain).unwrap(), &c.domain, 1e-8).unwrap();
        assert!(r.passed(), "{name}: {}", r.max_residual);
        let n = c.matrix.dim();
        assert_eq!(r.findings.len(), n * (n - 1), "{name}");
    }
}

#[test]
fn corrupted_potential_breaks_commutation_on_both_paths() {
    let c = identity_case(2).unwrap();
    let v = [
        parse_expr("x1^2", 2).unwrap(),
        parse_expr("x2^4", 2).unwrap(),
    ];
    let mut ops = quantize_with_potentials(&c.matrix, &v, &c.domain).unwrap();
    ops[0] = add_potential(&ops[0], &parse_expr("x1*x2", 2).unwrap());
    let r = check_commutation(&ops, &c.domain, 1e-8).unwrap();
    assert!(!r.passed());
    for label in ["[H1,H2] coefficients", "[H1,H2] applied"] {
        let f = r.finding(label).unwrap();
        assert!(f.residual >= 1e-2 && f.witness.is_some(), "{label}: {f:?}");
    }
    // the first-order coefficient is −2·x1 in front of ∂₂
    let comm = ops[0].commutator(&ops[1]).unwrap();
    let c1 = comm.coefficient(&[0, 1]).unwrap();
    assert!((c1.eval(&[0.5, 0.25]).unwrap() + 1.0).abs() < 1e-14);
}

#[test]
fn self_adjoint_examples() {
    let d = Domain::cube(1, -1.0, 1.0).unwrap();
    let r = check_self_adjoint(
        &DiffOp::partial(1, 0, 2),
        &Expr::one(),
        &d,
        QuadratureSpec::default(),
        1e-10,
    )
    .unwrap();
    assert!(r.passed(), "{}", r.max_residual);

    let c = by_name("vandermonde:2").unwrap();
    let phi = c.matrix.determinant();
    for op in quantize(&c.matrix, &c.domain).unwrap() {
        let r = check_self_adjoint(&op, &phi, &c.domain, QuadratureSpec::default(), 1e-6).unwrap();
        assert!(r.passed(), "{}", r.max_residual);
        let wrong = check_self_adjoint(
            &op,
            &Expr::one(),
            &c.domain,
            QuadratureSpec::default(),
            1e-6,
        )
        .unwrap();
        assert!(wrong.max_residual >= 1e-3);
    }
}

#[test]
fn wrong_weight_defect_matches_closed_form() {
    // ⟨b'', x b⟩ − ⟨b, (x b)''⟩ with weight eˣ integrates to ∫ b² eˣ dx on [−1, 1];
    // reference value from 30-digit quadrature
    let d = Domain::cube(1, -1.0, 1.0).unwrap();
    let b = bump(d.intervals());
    let h = Expr::var(0) * b.clone();
    let defect = symmetry_defect(
        &DiffOp::partial(1, 0, 2),
        &Expr::var(0).exp(),
        &b,
        &h,
        &d,
        QuadratureSpec::default(),
    )
    .unwrap();
    assert!((defect - 1.041_127_085_801_177_8).abs() < 1e-8, "{defect}");
}

#[test]
fn self_adjoint_preconditions() {
    let d = Domain::cube(1, -1.0, 1.0).unwrap();
    let q = QuadratureSpec::default();
    assert!(matches!(
        check_self_adjoint(&DiffOp::partial(1, 0, 3), &Expr::one(), &d, q, 1e-6),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        check_self_adjoint(&DiffOp::partial(1, 0, 2), &Expr::var(0), &d, q, 1e-6),
        Err(Error::QuadratureFailure(_))
    ));
    let d4 = Domain::cube(4, -1.0, 1.0).unwrap();
    assert!(matches!(
        check_self_adjoint(&DiffOp::partial(4, 0, 2), &Expr::one(), &d4, q, 1e-6),
        Err(Error::InvalidArgument(_))
    ));
}
