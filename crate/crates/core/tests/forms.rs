use fivevec_core::expr::max_norm_over;
use fivevec_core::forms::{
    self, exterior_d, exterior_d_nabla, FormField, IndexKind, ValueConnection, ValueSpace,
};
use fivevec_core::gauge::GaugeField;
use fivevec_core::linalg::ComplexMatrix;
use fivevec_core::sampling::{self, ChartBox};
use fivevec_core::{ComplexExpression, Point, DIM5};
use itertools::Itertools;
use proptest::prelude::*;
use rand::Rng;

fn points(seed: u64) -> Vec<Point> {
    sampling::sample_points(ChartBox::unit(), seed, 8, |_| true).unwrap()
}

fn random_form(rng: &mut impl Rng, kind: IndexKind, rank: usize, space: ValueSpace) -> FormField {
    let dim = space.dim();
    FormField::from_fn(kind, rank, space, |_| {
        (0..dim)
            .map(|_| sampling::random_complex_polynomial(rng, 2, 2))
            .collect()
    })
    .unwrap()
}

fn random_slices(rng: &mut impl Rng, n: usize) -> Vec<ComplexMatrix> {
    (0..DIM5)
        .map(|_| ComplexMatrix::from_fn(n, n, |_, _| sampling::random_complex_polynomial(rng, 1, 2)))
        .collect()
}

fn norm(f: &FormField, pts: &[Point]) -> f64 {
    f.max_norm(pts).unwrap()
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1.0 } else { -1.0 }
}

fn factorial(k: usize) -> f64 {
    (1..=k).product::<usize>() as f64
}

/// `(S ∧ T)_{a_1…a_{p+q}} = (1/p!q!) Σ_σ sgn σ S_{a_σ(1…p)} T_{a_σ(p+1…)}`.
fn brute_force_wedge(s: &FormField, t: &FormField, index: &[usize], p: &Point) -> f64 {
    let (m, k) = (s.rank(), t.rank());
    let mut acc = 0.0;
    for perm in (0..m + k).permutations(m + k) {
        let a: Vec<usize> = perm[..m].iter().map(|&i| index[i]).collect();
        let b: Vec<usize> = perm[m..].iter().map(|&i| index[i]).collect();
        let sv = s.component(&a)[0].eval(p).unwrap().re;
        let tv = t.component(&b)[0].eval(p).unwrap().re;
        acc += permutation_sign(&perm) * sv * tv;
    }
    acc / (factorial(m) * factorial(k))
}

fn real_scalar_form(rng: &mut impl Rng, rank: usize) -> FormField {
    FormField::from_fn(IndexKind::Five, rank, ValueSpace::Scalar, |_| {
        vec![ComplexExpression::real(sampling::random_polynomial(rng, 2, 2))]
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn wedge_matches_explicit_antisymmetrization(seed in any::<u64>(), m in 0usize..3, k in 0usize..3) {
        let mut rng = sampling::rng(seed);
        let s = real_scalar_form(&mut rng, m);
        let t = real_scalar_form(&mut rng, k);
        let w = forms::wedge(&s, &t).unwrap();
        let p = points(seed)[0];
        for index in (0..DIM5).combinations(m + k) {
            let stored = w.get(&index)[0].eval(&p).unwrap().re;
            let oracle = brute_force_wedge(&s, &t, &index, &p);
            prop_assert!((stored - oracle).abs() < 1e-12 * (1.0 + oracle.abs()));
        }
        let swapped = forms::wedge(&t, &s).unwrap().scale(if (m * k) % 2 == 0 { 1.0 } else { -1.0 });
        prop_assert!(norm(&w.sub(&swapped).unwrap(), &points(seed)) < 1e-13);
    }

    #[test]
    fn swapping_two_indices_flips_the_sign(seed in any::<u64>(), rank in 2usize..4) {
        let mut rng = sampling::rng(seed);
        let f = real_scalar_form(&mut rng, rank);
        let p = points(seed)[0];
        for index in (0..DIM5).permutations(rank) {
            let mut swapped = index.clone();
            swapped.swap(0, rank - 1);
            let a = f.component(&index)[0].eval(&p).unwrap();
            let b = f.component(&swapped)[0].eval(&p).unwrap();
            prop_assert_eq!(a, -b);
        }
    }

    #[test]
    fn dd_vanishes_on_scalar_forms(seed in any::<u64>(), rank in 0usize..4) {
        let mut rng = sampling::rng(seed);
        let f = random_form(&mut rng, IndexKind::Five, rank, ValueSpace::Scalar);
        let dd = exterior_d(&exterior_d(&f, None).unwrap(), None).unwrap();
        prop_assert!(norm(&dd, &points(seed)) < 1e-12);
    }

    #[test]
    fn d_and_d_nabla_differ_by_the_e_part_of_d_of_the_z_part(seed in any::<u64>(), rank in 0usize..3) {
        let mut rng = sampling::rng(seed);
        let space = ValueSpace::nonspacetime_vector(2);
        let t = random_form(&mut rng, IndexKind::Five, rank, space);
        let conn = ValueConnection::vector(&random_slices(&mut rng, 2));
        let lhs = exterior_d(&t, Some(&conn)).unwrap()
            .sub(&exterior_d_nabla(&t, Some(&conn)).unwrap()).unwrap();
        let rhs = exterior_d(&t.z_part(), Some(&conn)).unwrap().e_part();
        prop_assert!(norm(&lhs.sub(&rhs).unwrap(), &points(seed)) < 1e-12);
    }

    #[test]
    fn value_contraction_obeys_leibniz_for_dual_connections(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let n = 2;
        let b = random_slices(&mut rng, n);
        let s = random_form(&mut rng, IndexKind::Five, 1, ValueSpace::nonspacetime_vector(n));
        let t = random_form(&mut rng, IndexKind::Five, 1, ValueSpace::nonspacetime_covector(n));
        let sc = ValueConnection::vector(&b);
        let tc = ValueConnection::covector(&b);
        let defect = forms::leibniz_defect(&s, Some(&sc), &t, Some(&tc)).unwrap();
        prop_assert!(norm(&defect, &points(seed)) < 1e-10);
    }

    #[test]
    fn coordinate_free_d_matches_components(seed in any::<u64>(), rank in 1usize..3) {
        let mut rng = sampling::rng(seed);
        let n = 2;
        let s = random_form(&mut rng, IndexKind::Four, rank, ValueSpace::nonspacetime_vector(n));
        let conn = ValueConnection::vector(&random_slices(&mut rng, n));
        let vectors: Vec<Vec<ComplexExpression>> = (0..=rank)
            .map(|_| (0..4).map(|_| ComplexExpression::real(sampling::random_linear(&mut rng))).collect())
            .collect();
        let ds = exterior_d(&s, Some(&conn)).unwrap();
        let component = forms::pair(&ds, &vectors);
        let free = forms::coordinate_free_d(&s, Some(&conn), &vectors).unwrap();
        let d: Vec<ComplexExpression> = component.iter().zip(&free).map(|(a, b)| a - b).collect();
        prop_assert!(max_norm_over(&d, &points(seed)).unwrap() < 1e-10);
    }
}

#[test]
fn non_dual_connection_is_detected() {
    let mut rng = sampling::rng(99);
    let n = 2;
    let b = random_slices(&mut rng, n);
    let s = random_form(&mut rng, IndexKind::Five, 1, ValueSpace::nonspacetime_vector(n));
    let t = random_form(&mut rng, IndexKind::Five, 1, ValueSpace::nonspacetime_covector(n));
    let sc = ValueConnection::vector(&b);
    let mut delta = vec![ComplexMatrix::zeros(n, n); DIM5];
    delta[1].set(0, 1, ComplexExpression::constant(num_complex::Complex64::new(0.5, 0.0)));
    let tc = ValueConnection::covector(&b).perturbed(&delta);
    let defect = forms::leibniz_defect(&s, Some(&sc), &t, Some(&tc)).unwrap();
    assert!(norm(&defect, &points(1)) > 1e-3);
}

#[test]
fn operator_contraction_applies_f_to_s() {
    let mut rng = sampling::rng(5);
    let gauge = GaugeField::random(2, &mut rng, 1);
    let f = gauge.field_strength();
    let s = random_form(&mut rng, IndexKind::Five, 0, ValueSpace::nonspacetime_vector(2));
    let fs = forms::value_contract(f.form(), &s).unwrap();
    let pts = points(2);
    for a in 0..DIM5 {
        for b in a + 1..DIM5 {
            let direct = f.get(a, b).matvec(s.get(&[]));
            let d: Vec<ComplexExpression> =
                fs.get(&[a, b]).iter().zip(&direct).map(|(x, y)| x - y).collect();
            assert!(max_norm_over(&d, &pts).unwrap() < 1e-13);
        }
    }
}

#[test]
fn scalar_values_make_both_derivatives_equal() {
    let mut rng = sampling::rng(6);
    let t = random_form(&mut rng, IndexKind::Five, 2, ValueSpace::Scalar);
    let d = exterior_d(&t, None).unwrap();
    let dn = exterior_d_nabla(&t, None).unwrap();
    assert_eq!(norm(&d.sub(&dn).unwrap(), &points(3)), 0.0);
}
