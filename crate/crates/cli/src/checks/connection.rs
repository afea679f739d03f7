use fivevec_core::connection::{future_cone_samples, null_frame, DOperator, Tensor, VectorField};
use fivevec_core::expr::{max_abs_over, max_norm_over};
use fivevec_core::forms::{exterior_d, exterior_d_nabla, FormField, IndexKind, ValueConnection, ValueSpace};
use fivevec_core::pentavec::{causal_class, h_relation_residual, homogeneous_lift, FiveVector, LiftConvention, MetricH};
use fivevec_core::sampling;
use fivevec_core::{Expression, DIM5, FIFTH};
use rand::Rng;

use super::{real_diffs, Check, CheckError, Class, Context, Measurement, Requires};

/// Points at which the pointwise D-operator checks run.
const D_POINTS: usize = 4;
const CONE_VECTORS: usize = 100;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "form-leibniz",
        identity: "∂_A(s_B v^B) = (∇̄_A s)_B v^B + s_B (∇̄_A v)^B",
        class: Class::FirstDerivative,
        requires: Requires::Nothing,
        run: form_leibniz,
    },
    Check {
        name: "tensor-leibniz",
        identity: "∇̄(M⊗N) = ∇̄M⊗N + M⊗∇̄N",
        class: Class::FirstDerivative,
        requires: Requires::Nothing,
        run: tensor_leibniz,
    },
    Check {
        name: "mod-r-preservation",
        identity: "(∇̄_A f e_4)^α = 0",
        class: Class::Algebraic,
        requires: Requires::StandardBasis,
        run: mod_r_preservation,
    },
    Check {
        name: "standard-constraint",
        identity: "H^α_{4B} = 0",
        class: Class::Algebraic,
        requires: Requires::StandardBasis,
        run: standard_constraint,
    },
    Check {
        name: "fifth-slice-tensorial",
        identity: "H'_4 = L⁻¹ H_4 L L^4_4",
        class: Class::Algebraic,
        requires: Requires::StandardBasis,
        run: fifth_slice_tensorial,
    },
    Check {
        name: "transform-round-trip",
        identity: "H -> H' -> H restores H",
        class: Class::Algebraic,
        requires: Requires::StandardBasis,
        run: transform_round_trip,
    },
    Check {
        name: "d-reconstruction",
        identity: "D(u) = u^α Δ'_α + ‖u‖ Δ",
        class: Class::FirstDerivative,
        requires: Requires::StandardBasis,
        run: d_reconstruction,
    },
    Check {
        name: "d-gauge-shift",
        identity: "Δ'_α -> Δ'_α + X_α Δ, ϱ -> ‖u‖ - u^α X_α leaves D(u)",
        class: Class::Algebraic,
        requires: Requires::StandardBasis,
        run: d_gauge_shift,
    },
    Check {
        name: "h-relation",
        identity: "h(ŭ,ŭ) = (1+ξ) g(u,u)",
        class: Class::Algebraic,
        requires: Requires::NormalizedRegularBasis,
        run: h_relation,
    },
    Check {
        name: "metric-compatibility",
        identity: "∇̄_A g_BC = 0",
        class: Class::FirstDerivative,
        requires: Requires::Nothing,
        run: metric_compatibility,
    },
    Check {
        name: "dd-scalar",
        identity: "d d f = 0",
        class: Class::SecondDerivative,
        requires: Requires::Nothing,
        run: dd_scalar,
    },
    Check {
        name: "d-difference",
        identity: "d T - d^∇ T = (d T^Z)^E",
        class: Class::Algebraic,
        requires: Requires::Nothing,
        run: d_difference,
    },
];

fn random_field(rng: &mut impl Rng) -> VectorField {
    std::array::from_fn(|_| sampling::random_polynomial(rng, 2, 3))
}

fn form_leibniz(cx: &Context) -> Result<Measurement, CheckError> {
    let h = &cx.scenario.connection;
    let mut rng = cx.rng();
    let v = random_field(&mut rng);
    let s = random_field(&mut rng);
    let contraction: Expression = (0..DIM5).map(|b| &s[b] * &v[b]).sum();
    let mut defects = Vec::with_capacity(DIM5);
    for a in 0..DIM5 {
        let ds = h.cov_deriv_covector(&s, a);
        let dv = h.cov_deriv_vector(&v, a);
        let rhs: Expression = (0..DIM5).map(|b| &ds[b] * &v[b] + &s[b] * &dv[b]).sum();
        defects.push(h.frame_partial(&contraction, a) - rhs);
    }
    cx.measured(max_abs_over(&defects, cx.points)?)
}

fn tensor_leibniz(cx: &Context) -> Result<Measurement, CheckError> {
    let h = &cx.scenario.connection;
    let mut rng = cx.rng();
    let m = Tensor::vector(&random_field(&mut rng)).outer(&Tensor::covector(&random_field(&mut rng)));
    let n = Tensor::vector(&random_field(&mut rng));
    let mut worst = 0.0_f64;
    for a in 0..DIM5 {
        let lhs = h.cov_deriv_tensor(&m.outer(&n), a)?;
        let rhs = h
            .cov_deriv_tensor(&m, a)?
            .outer(&n)
            .add(&m.outer(&h.cov_deriv_tensor(&n, a)?));
        worst = worst.max(max_abs_over(&real_diffs(&lhs.comps, &rhs.comps), cx.points)?);
    }
    cx.measured(worst)
}

fn mod_r_preservation(cx: &Context) -> Result<Measurement, CheckError> {
    let h = &cx.scenario.connection;
    let mut v: VectorField = Default::default();
    v[FIFTH] = sampling::random_polynomial(&mut cx.rng(), 2, 3);
    let z: Vec<Expression> = (0..DIM5)
        .flat_map(|a| h.cov_deriv_vector(&v, a)[..FIFTH].to_vec())
        .collect();
    cx.measured(max_abs_over(&z, cx.points)?)
}

fn standard_constraint(cx: &Context) -> Result<Measurement, CheckError> {
    let exprs = cx.scenario.connection.standard_constraint_exprs();
    cx.measured(max_abs_over(&exprs, cx.points)?)
}

fn all_entries(h: &fivevec_core::connection::Connection) -> Vec<Expression> {
    (0..DIM5 * DIM5 * DIM5)
        .map(|k| h.get(k / 25, (k / 5) % 5, k % 5).clone())
        .collect()
}

fn fifth_slice_tensorial(cx: &Context) -> Result<Measurement, CheckError> {
    let h = &cx.scenario.connection;
    let change = sampling::random_standard_change(&mut cx.rng());
    let moved = h.transform(&change, cx.scenario.basis);
    let tensorial = h.fifth_slice_tensorial(&change)?;
    let generic = moved.slice(FIFTH);
    let d: Vec<Expression> = (0..DIM5 * DIM5)
        .map(|k| generic.get(k / 5, k % 5) - tensorial.get(k / 5, k % 5))
        .collect();
    cx.measured(max_abs_over(&d, cx.points)?)
}

fn transform_round_trip(cx: &Context) -> Result<Measurement, CheckError> {
    let h = &cx.scenario.connection;
    let basis = cx.scenario.basis;
    let change = sampling::random_standard_change(&mut cx.rng());
    let back = h.transform(&change, basis).transform(&change.inverse(), basis);
    cx.measured(max_abs_over(&real_diffs(&all_entries(&back), &all_entries(h)), cx.points)?)
}

/// Runs `f(D, decomposition, cone)` at the first few points and returns the
/// worst relative residual.
fn over_d_points(
    cx: &Context,
    f: impl Fn(&fivevec_core::connection::DDecomposition, &DOperator, &[f64; 4]) -> Result<f64, CheckError>,
) -> Result<Measurement, CheckError> {
    let s = cx.scenario;
    let used = &cx.points[..cx.points.len().min(D_POINTS)];
    let mut worst = 0.0_f64;
    for p in used {
        let d = DOperator::at(&s.connection, &s.metric, s.lift, p)?;
        let frame = null_frame(&d.g).ok_or("metric is not Lorentzian at a sample point")?;
        let dec = d.decompose(frame, cx.seed, 16)?;
        for u in future_cone_samples(&d.g, cx.seed ^ 1, CONE_VECTORS)? {
            worst = worst.max(f(&dec, &d, &u)?);
        }
    }
    Ok(Measurement {
        residual: worst,
        points: used.len(),
    })
}

fn d_reconstruction(cx: &Context) -> Result<Measurement, CheckError> {
    over_d_points(cx, |dec, d, u| {
        let direct = d.d(u)?;
        Ok(dec.reconstruct(u).distance(&direct) / (1.0 + direct.mat.amax()))
    })
}

fn d_gauge_shift(cx: &Context) -> Result<Measurement, CheckError> {
    let mut rng = cx.rng();
    let shift: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
    over_d_points(cx, move |dec, _, u| {
        let plain = dec.reconstruct(u);
        let shifted = dec.reconstruct_shifted(u, &shift);
        Ok(shifted.distance(&plain) / (1.0 + plain.mat.amax()))
    })
}

fn h_relation(cx: &Context) -> Result<Measurement, CheckError> {
    let s = cx.scenario;
    let xi = s.basis.xi;
    let mut worst = 0.0_f64;
    for p in cx.points {
        let g = s.metric.eval(p)?;
        let h = MetricH::normalized_regular(&g, xi);
        for u in future_cone_samples(&g, cx.seed, 20)? {
            for sign in [1.0, -1.0] {
                let v = FiveVector::from_z(u.map(|c| sign * c), s.basis);
                let class = causal_class(&v, &g);
                for convention in [LiftConvention::Reversible, LiftConvention::Irreversible] {
                    let lift = homogeneous_lift(&v, class, convention, &g)?;
                    let scale = 1.0 + v.c.norm_squared();
                    worst = worst.max(h_relation_residual(&lift, &g, &h, xi) / scale);
                }
            }
        }
    }
    cx.measured(worst)
}

fn metric_compatibility(cx: &Context) -> Result<Measurement, CheckError> {
    let s = cx.scenario;
    cx.measured(s.connection.metric_compat_residual(&s.metric, cx.points)?)
}

fn random_form(rng: &mut impl Rng, rank: usize, space: ValueSpace) -> Result<FormField, CheckError> {
    let dim = space.dim();
    Ok(FormField::from_fn(IndexKind::Five, rank, space, |_| {
        (0..dim)
            .map(|_| sampling::random_complex_polynomial(rng, 2, 2))
            .collect()
    })?)
}

fn dd_scalar(cx: &Context) -> Result<Measurement, CheckError> {
    let mut rng = cx.rng();
    let mut worst = 0.0_f64;
    for rank in 0..3 {
        let f = random_form(&mut rng, rank, ValueSpace::Scalar)?;
        let dd = exterior_d(&exterior_d(&f, None)?, None)?;
        worst = worst.max(dd.max_norm(cx.points)?);
    }
    cx.measured(worst)
}

fn d_difference(cx: &Context) -> Result<Measurement, CheckError> {
    let conn = ValueConnection::from_connection(&cx.scenario.connection, 1, 0)
        .ok_or("no value connection for five-vectors")?;
    let mut rng = cx.rng();
    let mut worst = 0.0_f64;
    for rank in 0..2 {
        let t = random_form(&mut rng, rank, conn.space().clone())?;
        let lhs = exterior_d(&t, Some(&conn))?.sub(&exterior_d_nabla(&t, Some(&conn))?)?;
        let rhs = exterior_d(&t.z_part(), Some(&conn))?.e_part();
        let d = lhs.sub(&rhs)?;
        worst = worst.max(max_norm_over(d.all_values(), cx.points)?);
    }
    cx.measured(worst)
}
