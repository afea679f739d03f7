use fivevec_core::expr::max_norm_over;
use fivevec_core::linalg::{BasisChange, ComplexMatrix};
use fivevec_core::npo::{self, NpoFields};
use fivevec_core::sampling::{self, ChartBox};
use fivevec_core::{ComplexExpression, Expression, Point, DIM5};
use num_complex::Complex64;
use proptest::prelude::*;

fn points(seed: u64) -> Vec<Point> {
    sampling::sample_points(ChartBox::unit(), seed, 12, |_| true).unwrap()
}

fn random_vector(n: usize, seed: u64) -> Vec<ComplexExpression> {
    let mut rng = sampling::rng(seed);
    (0..=n)
        .map(|_| sampling::random_complex_polynomial(&mut rng, 2, 3))
        .collect()
}

fn diff_norm(a: &[ComplexExpression], b: &[ComplexExpression], pts: &[Point]) -> f64 {
    let d: Vec<ComplexExpression> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    max_norm_over(&d, pts).unwrap()
}

#[test]
fn generator_invariants_hold_up_to_n_five() {
    for n in 2..=5 {
        let gens = npo::su_generators(n).unwrap();
        assert_eq!(gens.count(), n * n - 1);
        assert!(gens.trace_residual() < 1e-14, "n={n}");
        assert!(gens.commutator_residual() < 1e-14, "n={n}");
        assert!(gens.antisymmetry_residual() < 1e-14, "n={n}");
        assert!(gens.tracelessness_residual() < 1e-14, "n={n}");
    }
}

#[test]
fn conjugation_is_an_involution() {
    let gens = npo::su_generators(3).unwrap();
    let fields = NpoFields::random(3, 0.8, &mut sampling::rng(4), 2);
    let twice = fields.conjugated(&gens).conjugated(&gens);
    let pts = points(1);
    for a in 0..gens.count() {
        for d in 0..DIM5 {
            let diff = &twice.ca[a][d] - &fields.ca[a][d];
            assert!(fivevec_core::expr::max_abs_over([&diff], &pts).unwrap() < 1e-14);
        }
    }
}

#[test]
fn trace_vanishes_for_any_input() {
    for n in 2..=4 {
        let gens = npo::su_generators(n).unwrap();
        let fields = NpoFields::random(n, 1.3, &mut sampling::rng(n as u64), 2);
        let c = npo::assemble(&fields, &gens).unwrap();
        assert!(max_norm_over(&c.trace_exprs(), &points(2)).unwrap() < 1e-12);
        assert!(c.standard_constraint_exprs().iter().all(ComplexExpression::is_zero));
    }
}

#[test]
fn z_block_is_anti_hermitian() {
    let gens = npo::su_generators(3).unwrap();
    let fields = NpoFields::random(3, 0.9, &mut sampling::rng(8), 2);
    let z = npo::assemble(&fields, &gens).unwrap().z_block();
    let theta = ComplexMatrix::identity(3);
    assert!(z.hermitian_residual(&theta, &points(3)).unwrap() < 1e-12);
}

#[test]
fn explicit_vector_and_form_rules_match_generic_contraction() {
    for n in 2..=3 {
        let gens = npo::su_generators(n).unwrap();
        let fields = NpoFields::random(n, 0.7, &mut sampling::rng(10 + n as u64), 2);
        let c = npo::assemble(&fields, &gens).unwrap();
        let u = random_vector(n, 20);
        let pts = points(4);
        for dir in 0..DIM5 {
            let explicit = npo::cov_deriv_components(&fields, &gens, &u, dir);
            assert!(diff_norm(&explicit, &c.cov_deriv(&u, dir), &pts) < 1e-13);
            let explicit = npo::cov_deriv_form_components(&fields, &gens, &u, dir);
            assert!(diff_norm(&explicit, &c.cov_deriv_form(&u, dir), &pts) < 1e-13);
        }
    }
}

#[test]
fn pairing_obeys_leibniz() {
    let n = 3;
    let gens = npo::su_generators(n).unwrap();
    let fields = NpoFields::random(n, 1.1, &mut sampling::rng(30), 2);
    let c = npo::assemble(&fields, &gens).unwrap();
    let u = random_vector(n, 31);
    let v = random_vector(n, 32);
    let pair = |a: &[ComplexExpression], b: &[ComplexExpression]| -> ComplexExpression {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    };
    let pts = points(5);
    for dir in 0..DIM5 {
        let lhs = pair(&v, &u).partial(dir);
        let rhs = pair(&c.cov_deriv_form(&v, dir), &u) + pair(&v, &c.cov_deriv(&u, dir));
        assert!(max_norm_over([&(lhs - rhs)], &pts).unwrap() < 1e-12);
    }
}

#[test]
fn relabelled_rule_with_conjugate_fields_reproduces_vector_rule() {
    let n = 3;
    let gens = npo::su_generators(n).unwrap();
    let fields = NpoFields::random(n, 0.6, &mut sampling::rng(40), 2);
    let tilde = fields.conjugated(&gens);
    let u = random_vector(n, 41);
    let pts = points(6);
    for dir in 0..DIM5 {
        let a = npo::cov_deriv_relabelled(&tilde, &gens, &u, dir);
        let b = npo::cov_deriv_components(&fields, &gens, &u, dir);
        assert!(diff_norm(&a, &b, &pts) < 1e-13);
    }
}

#[test]
fn charge_asymmetry_is_exactly_the_x_coupling() {
    let n = 2;
    let g = 0.9;
    let gens = npo::su_generators(n).unwrap();
    let fields = NpoFields::random(n, g, &mut sampling::rng(50), 2);
    let u = random_vector(n, 51);
    let residual = npo::charge_asymmetry_exprs(&fields, &gens, &u);
    // Oracle: g u_& X_i in the i-slots and g Σ_j u_j X_j in the &-slot.
    let mut oracle = Vec::new();
    for dir in 0..DIM5 {
        for i in 0..n {
            oracle.push((&u[n] * &fields.x[i][dir]).scale(Complex64::new(g, 0.0)));
        }
        let s: ComplexExpression = (0..n).map(|j| &u[j] * &fields.x[j][dir]).sum();
        oracle.push(s.scale(Complex64::new(g, 0.0)));
    }
    assert!(diff_norm(&residual, &oracle, &points(7)) < 1e-12);

    let mut no_x = fields.clone();
    no_x.x = vec![Default::default(); n];
    let residual = npo::charge_asymmetry_exprs(&no_x, &gens, &u);
    assert!(max_norm_over(&residual, &points(7)).unwrap() < 1e-12);
}

#[test]
fn field_strength_blocks_match_generic_curvature() {
    for n in 2..=3 {
        let gens = npo::su_generators(n).unwrap();
        let fields = NpoFields::random(n, 0.8, &mut sampling::rng(60 + n as u64), 2);
        let f = npo::assemble(&fields, &gens).unwrap().field_strength();
        let pts = points(8);

        let zero_block = npo::extract_block(&f, n, 0..n, n..n + 1);
        assert!(zero_block.is_symbolically_zero());

        let zz = npo::extract_block(&f, n, 0..n, 0..n);
        let oracle = npo::block_zz(&fields, &gens);
        assert!(zz.sub(&oracle).unwrap().max_norm(&pts).unwrap() < 1e-11);

        let ee = npo::extract_block(&f, n, n..n + 1, n..n + 1);
        assert!(ee.sub(&npo::block_ee(&fields)).unwrap().max_norm(&pts).unwrap() < 1e-11);

        let ez = npo::extract_block(&f, n, n..n + 1, 0..n);
        let oracle = npo::block_ez(&fields, &gens).unwrap();
        assert!(ez.sub(&oracle).unwrap().max_norm(&pts).unwrap() < 1e-11);
    }
}

#[test]
fn abelian_limit_field_strength() {
    let gens = npo::su_generators(2).unwrap();
    let g = 1.5;
    let mut fields = NpoFields::zero(2, g);
    fields.c0[0] = Expression::coord(1);
    let ee = npo::block_ee(&fields);
    let v = ee.get(&[0, 1])[0].eval(&[0.3, 0.1, 0.2, 0.4]).unwrap();
    // F⁰_01 = -1, so F^&_&01 = ig/√3.
    assert!((v - Complex64::new(0.0, g / 3f64.sqrt())).norm() < 1e-14);
    let f = npo::assemble(&fields, &gens).unwrap().field_strength();
    let generic = npo::extract_block(&f, 2, 2..3, 2..3);
    assert!(generic.sub(&ee).unwrap().max_norm(&points(9)).unwrap() < 1e-14);
}

#[test]
fn bianchi_identity_for_full_connection() {
    let gens = npo::su_generators(2).unwrap();
    let fields = NpoFields::random(2, 0.5, &mut sampling::rng(70), 2);
    let gauge = npo::assemble(&fields, &gens).unwrap().as_gauge();
    let df = gauge.bianchi().unwrap();
    assert!(df.max_norm(&points(10)).unwrap() < 1e-9);
}

#[test]
fn quotient_vectors_see_only_the_z_block() {
    let n = 3;
    let gens = npo::su_generators(n).unwrap();
    let fields = NpoFields::random(n, 0.7, &mut sampling::rng(80), 2);
    let c = npo::assemble(&fields, &gens).unwrap();
    let z = c.z_block();
    let pts = points(11);
    for seed in 0..20 {
        let u = random_vector(n, 100 + seed);
        for dir in 0..DIM5 {
            let full = c.cov_deriv(&u, dir);
            let quotient = z.cov_deriv(&u[..n], dir);
            assert!(diff_norm(&full[..n], &quotient, &pts) < 1e-13);
        }
    }
}

fn phase(alpha: &Expression) -> ComplexExpression {
    ComplexExpression::new(alpha.cos(), alpha.sin())
}

#[test]
fn u1_phase_shifts_the_amp_coefficient() {
    let n = 2;
    let gens = npo::su_generators(n).unwrap();
    let fields = NpoFields::random(n, 1.0, &mut sampling::rng(90), 2);
    let c = npo::assemble(&fields, &gens).unwrap();
    let alpha = Expression::coord(0) * 0.7 + Expression::coord(2) * Expression::coord(3);
    let mut l = ComplexMatrix::identity(n + 1);
    let mut l_inv = ComplexMatrix::identity(n + 1);
    l.set(n, n, phase(&alpha));
    l_inv.set(n, n, phase(&-&alpha));
    let moved = c.transform(&BasisChange::with_inverse(l, l_inv)).unwrap();
    let pts = points(12);
    for dir in 0..DIM5 {
        let expected = c.get(n, n, dir) + &ComplexExpression::imag(alpha.partial(dir));
        assert!(max_norm_over([&(moved.get(n, n, dir) - &expected)], &pts).unwrap() < 1e-12);
    }
}

#[test]
fn regular_change_moves_x_slice_by_block_rule() {
    let n = 2;
    let gens = npo::su_generators(n).unwrap();
    let fields = NpoFields::random(n, 1.0, &mut sampling::rng(91), 1);
    let c = npo::assemble(&fields, &gens).unwrap();
    let mut rng = sampling::rng(92);
    let mut l = ComplexMatrix::identity(n + 1);
    for i in 0..n {
        for j in 0..n {
            let base = if i == j { 2.0 } else { 0.0 };
            l.set(i, j, ComplexExpression::real(sampling::random_linear(&mut rng) * 0.2 + base));
        }
        l.set(i, n, ComplexExpression::real(sampling::random_linear(&mut rng)));
    }
    l.set(n, n, ComplexExpression::new(Expression::constant(1.2), Expression::coord(1)));
    let change = BasisChange::new(l);
    let moved = c.transform(&change).unwrap();
    let rule = c.regular_x_slice(&change);
    let pts = points(13);
    for dir in 0..DIM5 {
        for j in 0..n {
            let d = moved.get(n, j, dir) - &rule[dir][j];
            assert!(max_norm_over([&d], &pts).unwrap() < 1e-12);
        }
    }
    let back = moved.transform(&change.inverse()).unwrap();
    for dir in 0..DIM5 {
        let d = back.slice(dir).sub(c.slice(dir));
        let entries: Vec<ComplexExpression> = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| (i, j)))
            .map(|(i, j)| d.get(i, j).clone())
            .collect();
        assert!(max_norm_over(&entries, &pts).unwrap() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn amp_only_vectors_keep_zero_z_derivative(seed in 0u64..1000, n in 2usize..4) {
        let gens = npo::su_generators(n).unwrap();
        let fields = NpoFields::random(n, 1.0, &mut sampling::rng(seed), 2);
        let mut u = vec![ComplexExpression::zero(); n + 1];
        u[n] = sampling::random_complex_polynomial(&mut sampling::rng(seed + 1), 2, 3);
        for dir in 0..DIM5 {
            let du = npo::cov_deriv_components(&fields, &gens, &u, dir);
            prop_assert!(du[..n].iter().all(ComplexExpression::is_zero));
        }
    }

    #[test]
    fn assembled_trace_is_zero(seed in 0u64..1000, n in 2usize..5, g in -2.0f64..2.0) {
        let gens = npo::su_generators(n).unwrap();
        let fields = NpoFields::random(n, g, &mut sampling::rng(seed), 1);
        let c = npo::assemble(&fields, &gens).unwrap();
        prop_assert!(max_norm_over(&c.trace_exprs(), &points(seed)).unwrap() < 1e-12);
    }
}
