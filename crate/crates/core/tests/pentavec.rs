use fivevec_core::pentavec::{
    causal_class, h_relation_residual, homogeneous_lift, BasisDescriptor, CausalClass,
    FiveVector, LiftConvention, MetricG, MetricH, Xi,
};
use fivevec_core::FIFTH;
use nalgebra::{Matrix4, Matrix5};
use proptest::prelude::*;

fn nr() -> BasisDescriptor {
    BasisDescriptor::default()
}

/// Minkowski plus a small symmetric perturbation, which stays Lorentzian.
fn metric(eps: [f64; 10]) -> MetricG {
    let mut block = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, -1.0));
    let mut k = 0;
    for i in 0..4 {
        for j in i..4 {
            block[(i, j)] += 0.1 * eps[k];
            block[(j, i)] = block[(i, j)];
            k += 1;
        }
    }
    MetricG::from_block(&block)
}

fn lift(u: &FiveVector, g: &MetricG, convention: LiftConvention) -> FiveVector {
    homogeneous_lift(u, causal_class(u, g), convention, g).unwrap()
}

fn vec5() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-2.0f64..2.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lift_is_positively_homogeneous(
        u in vec5(),
        k in 0.01f64..50.0,
        eps in prop::array::uniform10(-1.0f64..1.0),
    ) {
        let g = metric(eps);
        let v = FiveVector::from_z(u, nr());
        for convention in [LiftConvention::Reversible, LiftConvention::Irreversible] {
            let a = lift(&v.scale(k), &g, convention);
            let b = lift(&v, &g, convention).scale(k);
            prop_assert!((a.c - b.c).amax() <= 1e-12 * (1.0 + b.c.amax()));
        }
    }

    #[test]
    fn lift_conventions_by_causal_class(u in vec5(), eps in prop::array::uniform10(-1.0f64..1.0)) {
        let g = metric(eps);
        let v = FiveVector::from_z(u, nr());
        let norm = g.norm(&v);
        let rev = lift(&v, &g, LiftConvention::Reversible);
        let irr = lift(&v, &g, LiftConvention::Irreversible);
        prop_assert_eq!(rev.spacetime(), u);
        prop_assert_eq!(irr.lambda(), norm);
        match causal_class(&v, &g) {
            CausalClass::FutureTimelikeOrNull => prop_assert_eq!(rev.lambda(), norm),
            CausalClass::PastTimelikeOrNull => {
                prop_assert_eq!(rev.lambda(), -norm);
                // Time reversal commutes with the reversible lift.
                let flipped = lift(&v.scale(-1.0), &g, LiftConvention::Reversible);
                prop_assert!((flipped.c + rev.c).amax() < 1e-12);
            }
            CausalClass::Spacelike => prop_assert_eq!(rev.lambda(), 0.0),
        }
    }

    #[test]
    fn h_relation_holds_off_the_spacelike_region(
        x in prop::array::uniform3(-1.0f64..1.0),
        stretch in 2.0f64..4.0,
        past in any::<bool>(),
        plus in any::<bool>(),
        eps in prop::array::uniform10(-1.0f64..1.0),
    ) {
        let g = metric(eps);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let t = if past { -stretch * r - 0.1 } else { stretch * r + 0.1 };
        let v = FiveVector::from_z([t, x[0], x[1], x[2]], nr());
        prop_assert!(causal_class(&v, &g) != CausalClass::Spacelike);
        let xi = if plus { Xi::Plus } else { Xi::Minus };
        let h = MetricH::normalized_regular(&g, xi);
        for convention in [LiftConvention::Reversible, LiftConvention::Irreversible] {
            let l = lift(&v, &g, convention);
            let scale = 1.0 + v.c.norm_squared();
            prop_assert!(h_relation_residual(&l, &g, &h, xi) <= 1e-12 * scale);
        }
    }

    #[test]
    fn h_is_invariant_under_basis_change(
        u in prop::array::uniform5(-2.0f64..2.0),
        m in prop::array::uniform16(-0.3f64..0.3),
        l44 in 0.5f64..2.0,
    ) {
        let g = MetricG::minkowski();
        let h = MetricH::normalized_regular(&g, Xi::Minus);
        let mut l = Matrix5::identity();
        for i in 0..4 {
            for j in 0..4 {
                l[(i, j)] += m[4 * i + j];
            }
        }
        l[(FIFTH, FIFTH)] = l44;
        prop_assume!(l.determinant().abs() > 1e-3);
        let v = FiveVector::new(u, nr());
        let moved = v.transform(&l, nr()).unwrap();
        let h2 = h.transform(&l);
        let before = h.inner(&v, &v).unwrap();
        let after = h2.inner(&moved, &moved).unwrap();
        prop_assert!((before - after).abs() <= 1e-10 * (1.0 + before.abs()));
    }

    #[test]
    fn mod_r_ignores_only_the_fifth_component(u in prop::array::uniform5(-2.0f64..2.0), t in -5.0f64..5.0) {
        let a = FiveVector::new(u, nr());
        let e = FiveVector::basis_vector(FIFTH, nr()).scale(t);
        prop_assert!(a.equivalent_mod_r(&(a + e)).unwrap());
        let (z, ep) = a.split().unwrap();
        prop_assert_eq!((z + ep).c, a.c);
        prop_assert_eq!(ep.spacetime(), [0.0; 4]);
    }
}

#[test]
fn null_vectors_satisfy_the_h_relation_exactly() {
    let g = MetricG::minkowski();
    for xi in [Xi::Plus, Xi::Minus] {
        let h = MetricH::normalized_regular(&g, xi);
        for u in [[1.0, 1.0, 0.0, 0.0], [-2.0, 0.0, 2.0, 0.0], [3.0, 0.0, 0.0, -3.0]] {
            let l = lift(&FiveVector::from_z(u, nr()), &g, LiftConvention::Reversible);
            assert_eq!(l.lambda(), 0.0);
            assert_eq!(h_relation_residual(&l, &g, &h, xi), 0.0);
        }
    }
}
