use fivevec_core::expr::max_norm_over;
use fivevec_core::forms::{self, FormField, IndexKind, ValueSpace};
use fivevec_core::linalg::ComplexMatrix;
use fivevec_core::sampling;
use fivevec_core::{ComplexExpression, Point, DIM5, FIFTH};
use rand::Rng;

use super::{complex_diffs, Check, CheckError, Class, Context, Measurement, Requires};

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "gauge-hermiticity",
        identity: "∂_A θ_ij = θ_kj B̄^k_iA + θ_ik B^k_jA",
        class: Class::FirstDerivative,
        requires: Requires::Gauge,
        run: hermiticity,
    },
    Check {
        name: "gauge-fifth-slice-tensorial",
        identity: "B'_4 = L⁻¹ B_4 L",
        class: Class::Algebraic,
        requires: Requires::Gauge,
        run: fifth_slice_tensorial,
    },
    Check {
        name: "gauge-round-trip",
        identity: "B -> B' -> B restores B",
        class: Class::Algebraic,
        requires: Requires::Gauge,
        run: round_trip,
    },
    Check {
        name: "field-strength-covariance",
        identity: "F' = L⁻¹ F L",
        class: Class::FirstDerivative,
        requires: Requires::Gauge,
        run: field_strength_covariance,
    },
    Check {
        name: "nabla-zero-slices",
        identity: "F^∇_{α4} = 0 symbolically",
        class: Class::Exact,
        requires: Requires::Gauge,
        run: nabla_zero_slices,
    },
    Check {
        name: "regular-agreement",
        identity: "F_αβ = F^∇_αβ",
        class: Class::Algebraic,
        requires: Requires::Gauge,
        run: regular_agreement,
    },
    Check {
        name: "gauge-commutator",
        identity: "[∇̄_A, ∇̄_B] S = F_AB S",
        class: Class::SecondDerivative,
        requires: Requires::Gauge,
        run: commutator,
    },
    Check {
        name: "bianchi",
        identity: "d F = 0",
        class: Class::SecondDerivative,
        requires: Requires::Gauge,
        run: bianchi,
    },
    Check {
        name: "bianchi-nabla",
        identity: "d^∇ F^∇ = 0",
        class: Class::SecondDerivative,
        requires: Requires::Gauge,
        run: bianchi_nabla,
    },
    Check {
        name: "dd-vector",
        identity: "d d S = ≺F ∧ S≻",
        class: Class::SecondDerivative,
        requires: Requires::Gauge,
        run: dd_vector,
    },
    Check {
        name: "value-leibniz",
        identity: "d≺S ∧ T≻ = ≺dS ∧ T≻ + (-1)^p ≺S ∧ dT≻",
        class: Class::FirstDerivative,
        requires: Requires::Gauge,
        run: value_leibniz,
    },
    Check {
        name: "coordinate-free-d",
        identity: "dS(v_0..v_p) from derivatives and brackets = components of dS",
        class: Class::FirstDerivative,
        requires: Requires::Gauge,
        run: coordinate_free_d,
    },
];

fn matrix_entries(m: &ComplexMatrix) -> Vec<ComplexExpression> {
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).clone())
        .collect()
}

fn matrix_diff(a: &ComplexMatrix, b: &ComplexMatrix, pts: &[Point]) -> Result<f64, CheckError> {
    Ok(max_norm_over(&matrix_entries(&a.sub(b)), pts)?)
}

fn random_form(
    rng: &mut impl Rng,
    kind: IndexKind,
    rank: usize,
    space: ValueSpace,
) -> Result<FormField, CheckError> {
    let dim = space.dim();
    Ok(FormField::from_fn(kind, rank, space, |_| {
        (0..dim)
            .map(|_| sampling::random_complex_polynomial(rng, 2, 2))
            .collect()
    })?)
}

fn hermiticity(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.gauge()?;
    cx.measured(sector.field.hermitian_residual(&sector.theta, cx.points)?)
}

fn fifth_slice_tensorial(cx: &Context) -> Result<Measurement, CheckError> {
    let b = &cx.gauge()?.field;
    let change = sampling::random_gauge_change(&mut cx.rng(), b.n());
    let moved = b.transform(&change)?;
    cx.measured(matrix_diff(moved.slice(FIFTH), &b.fifth_slice_tensorial(&change), cx.points)?)
}

fn round_trip(cx: &Context) -> Result<Measurement, CheckError> {
    let b = &cx.gauge()?.field;
    let change = sampling::random_gauge_change(&mut cx.rng(), b.n());
    let back = b.transform(&change)?.transform(&change.inverse())?;
    let mut worst = 0.0_f64;
    for a in 0..DIM5 {
        worst = worst.max(matrix_diff(back.slice(a), b.slice(a), cx.points)?);
    }
    cx.measured(worst)
}

fn field_strength_covariance(cx: &Context) -> Result<Measurement, CheckError> {
    let b = &cx.gauge()?.field;
    let change = sampling::random_gauge_change(&mut cx.rng(), b.n());
    let lhs = b.transform(&change)?.field_strength();
    let rhs = b.field_strength().conjugate(&change);
    cx.measured(lhs.form().sub(rhs.form())?.max_norm(cx.points)?)
}

fn nabla_zero_slices(cx: &Context) -> Result<Measurement, CheckError> {
    super::exact(cx.gauge()?.field.field_strength_nabla().nonzero_fifth_entries())
}

fn regular_agreement(cx: &Context) -> Result<Measurement, CheckError> {
    let b = &cx.gauge()?.field;
    let full = b.field_strength();
    let nabla = b.field_strength_nabla();
    let mut worst = 0.0_f64;
    for a in 0..FIFTH {
        for c in a + 1..FIFTH {
            worst = worst.max(matrix_diff(&full.get(a, c), &nabla.get(a, c), cx.points)?);
        }
    }
    cx.measured(worst)
}

fn commutator(cx: &Context) -> Result<Measurement, CheckError> {
    let b = &cx.gauge()?.field;
    let mut rng = cx.rng();
    let s: Vec<ComplexExpression> = (0..b.n())
        .map(|_| sampling::random_complex_polynomial(&mut rng, 2, 3))
        .collect();
    cx.measured(max_norm_over(&b.commutator_defect(&s), cx.points)?)
}

fn bianchi(cx: &Context) -> Result<Measurement, CheckError> {
    cx.measured(cx.gauge()?.field.bianchi()?.max_norm(cx.points)?)
}

fn bianchi_nabla(cx: &Context) -> Result<Measurement, CheckError> {
    cx.measured(cx.gauge()?.field.bianchi_nabla()?.max_norm(cx.points)?)
}

fn dd_vector(cx: &Context) -> Result<Measurement, CheckError> {
    let b = &cx.gauge()?.field;
    let s = random_form(&mut cx.rng(), IndexKind::Five, 0, ValueSpace::nonspacetime_vector(b.n()))?;
    cx.measured(b.dd_defect(&s)?.max_norm(cx.points)?)
}

fn value_leibniz(cx: &Context) -> Result<Measurement, CheckError> {
    let b = &cx.gauge()?.field;
    let n = b.n();
    let mut rng = cx.rng();
    let s = random_form(&mut rng, IndexKind::Five, 1, ValueSpace::nonspacetime_vector(n))?;
    let t = random_form(&mut rng, IndexKind::Five, 1, ValueSpace::nonspacetime_covector(n))?;
    let defect = forms::leibniz_defect(
        &s,
        Some(&b.vector_connection()),
        &t,
        Some(&b.covector_connection()),
    )?;
    cx.measured(defect.max_norm(cx.points)?)
}

fn coordinate_free_d(cx: &Context) -> Result<Measurement, CheckError> {
    let b = &cx.gauge()?.field;
    let n = b.n();
    let conn = b.vector_connection();
    let mut rng = cx.rng();
    let mut worst = 0.0_f64;
    for rank in 1..3 {
        let s = random_form(&mut rng, IndexKind::Four, rank, ValueSpace::nonspacetime_vector(n))?;
        let vectors: Vec<Vec<ComplexExpression>> = (0..=rank)
            .map(|_| {
                (0..4)
                    .map(|_| ComplexExpression::real(sampling::random_linear(&mut rng)))
                    .collect()
            })
            .collect();
        let component = forms::pair(&forms::exterior_d(&s, Some(&conn))?, &vectors);
        let free = forms::coordinate_free_d(&s, Some(&conn), &vectors)?;
        worst = worst.max(max_norm_over(&complex_diffs(&component, &free), cx.points)?);
    }
    cx.measured(worst)
}
