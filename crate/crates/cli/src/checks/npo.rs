use fivevec_core::expr::max_norm_over;
use fivevec_core::linalg::{BasisChange, ComplexMatrix};
use fivevec_core::npo::{self, NpoConnection};
use fivevec_core::sampling;
use fivevec_core::{ComplexExpression, Expression, DIM5};
use num_complex::Complex64;
use rand::Rng;

use super::{complex_diffs, nonzero_values, Check, CheckError, Class, Context, Measurement, Requires};
use crate::scenario::NpoSector;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "npo-generators",
        identity: "Tr(t_a t_b) = 2δ_ab, [t_a, t_b] = 2i f^c_ab t_c",
        class: Class::Algebraic,
        requires: Requires::Npo,
        run: generators,
    },
    Check {
        name: "npo-standard-constraint",
        identity: "C^i_{&A} = 0 symbolically",
        class: Class::Exact,
        requires: Requires::Npo,
        run: standard_constraint,
    },
    Check {
        name: "npo-hermiticity",
        identity: "C^i_jA + (C^j_iA)* = 0",
        class: Class::FirstDerivative,
        requires: Requires::Npo,
        run: hermiticity,
    },
    Check {
        name: "npo-trace",
        identity: "C^Θ_ΘA = 0",
        class: Class::Algebraic,
        requires: Requires::Npo,
        run: trace,
    },
    Check {
        name: "npo-vector-derivative",
        identity: "explicit (∇̄u)^Θ = ∂u^Θ + C^Θ_Ξ u^Ξ",
        class: Class::Algebraic,
        requires: Requires::Npo,
        run: vector_derivative,
    },
    Check {
        name: "npo-form-derivative",
        identity: "explicit (∇̄v)_Ξ = ∂v_Ξ - v_Θ C^Θ_Ξ",
        class: Class::Algebraic,
        requires: Requires::Npo,
        run: form_derivative,
    },
    Check {
        name: "npo-charge-asymmetry",
        identity: "relabelled - form rule = g (u_& X_i, Σ u_j X_j)",
        class: Class::Algebraic,
        requires: Requires::Npo,
        run: charge_asymmetry,
    },
    Check {
        name: "npo-zero-block",
        identity: "F^i_& = 0 symbolically",
        class: Class::Exact,
        requires: Requires::Npo,
        run: zero_block,
    },
    Check {
        name: "npo-blocks",
        identity: "F^i_j, F^&_&, F^&_j = g dX̃ match the generic curvature",
        class: Class::FirstDerivative,
        requires: Requires::Npo,
        run: blocks,
    },
    Check {
        name: "npo-bianchi",
        identity: "d F = 0 for C",
        class: Class::SecondDerivative,
        requires: Requires::Npo,
        run: bianchi,
    },
    Check {
        name: "npo-phase",
        identity: "L = diag(1, e^{iα}) gives C'^&_& = C^&_& + i∂α",
        class: Class::FirstDerivative,
        requires: Requires::Npo,
        run: phase,
    },
    Check {
        name: "npo-regular-x-slice",
        identity: "C'^&_j = (L⁻¹)^&_& C^&_l L^l_j",
        class: Class::Algebraic,
        requires: Requires::Npo,
        run: regular_x_slice,
    },
];

fn assembled(sector: &NpoSector) -> Result<NpoConnection, CheckError> {
    Ok(npo::assemble(&sector.fields, &sector.gens)?)
}

fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<ComplexExpression> {
    (0..=n)
        .map(|_| sampling::random_complex_polynomial(rng, 2, 3))
        .collect()
}

fn slice_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Vec<ComplexExpression> {
    let d = a.sub(b);
    (0..d.rows())
        .flat_map(|i| (0..d.cols()).map(move |j| (i, j)))
        .map(|(i, j)| d.get(i, j).clone())
        .collect()
}

fn generators(cx: &Context) -> Result<Measurement, CheckError> {
    let gens = &cx.npo()?.gens;
    Ok(Measurement {
        residual: gens.trace_residual().max(gens.commutator_residual()),
        points: 0,
    })
}

fn standard_constraint(cx: &Context) -> Result<Measurement, CheckError> {
    let c = assembled(cx.npo()?)?;
    super::exact(c.standard_constraint_exprs().iter().filter(|e| !e.is_zero()).count())
}

fn hermiticity(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.npo()?;
    let z = assembled(sector)?.z_block();
    cx.measured(z.hermitian_residual(&ComplexMatrix::identity(sector.fields.n), cx.points)?)
}

fn trace(cx: &Context) -> Result<Measurement, CheckError> {
    cx.measured(max_norm_over(&assembled(cx.npo()?)?.trace_exprs(), cx.points)?)
}

fn vector_derivative(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.npo()?;
    let c = assembled(sector)?;
    let u = random_vector(&mut cx.rng(), sector.fields.n);
    let mut worst = 0.0_f64;
    for dir in 0..DIM5 {
        let explicit = npo::cov_deriv_components(&sector.fields, &sector.gens, &u, dir);
        let generic = c.cov_deriv(&u, dir);
        worst = worst.max(max_norm_over(&complex_diffs(&explicit, &generic), cx.points)?);
    }
    cx.measured(worst)
}

fn form_derivative(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.npo()?;
    let c = assembled(sector)?;
    let v = random_vector(&mut cx.rng(), sector.fields.n);
    let mut worst = 0.0_f64;
    for dir in 0..DIM5 {
        let explicit = npo::cov_deriv_form_components(&sector.fields, &sector.gens, &v, dir);
        let generic = c.cov_deriv_form(&v, dir);
        worst = worst.max(max_norm_over(&complex_diffs(&explicit, &generic), cx.points)?);
    }
    cx.measured(worst)
}

/// The asymmetry must equal the X coupling exactly, so the residual is the
/// distance to that prediction rather than the asymmetry itself.
fn charge_asymmetry(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.npo()?;
    let fields = &sector.fields;
    let n = fields.n;
    let g = Complex64::new(fields.g, 0.0);
    let u = random_vector(&mut cx.rng(), n);
    let asymmetry = npo::charge_asymmetry_exprs(fields, &sector.gens, &u);
    let mut predicted = Vec::with_capacity(asymmetry.len());
    for dir in 0..DIM5 {
        for i in 0..n {
            predicted.push((&u[n] * &fields.x[i][dir]).scale(g));
        }
        let s: ComplexExpression = (0..n).map(|j| &u[j] * &fields.x[j][dir]).sum();
        predicted.push(s.scale(g));
    }
    cx.measured(max_norm_over(&complex_diffs(&asymmetry, &predicted), cx.points)?)
}

fn zero_block(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.npo()?;
    let n = sector.fields.n;
    let f = assembled(sector)?.field_strength();
    super::exact(nonzero_values(&npo::extract_block(&f, n, 0..n, n..n + 1)))
}

fn blocks(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.npo()?;
    let (fields, gens) = (&sector.fields, &sector.gens);
    let n = fields.n;
    let f = assembled(sector)?.field_strength();
    let zz = npo::extract_block(&f, n, 0..n, 0..n).sub(&npo::block_zz(fields, gens))?;
    let ee = npo::extract_block(&f, n, n..n + 1, n..n + 1).sub(&npo::block_ee(fields))?;
    let ez = npo::extract_block(&f, n, n..n + 1, 0..n).sub(&npo::block_ez(fields, gens)?)?;
    let mut worst = 0.0_f64;
    for d in [zz, ee, ez] {
        worst = worst.max(d.max_norm(cx.points)?);
    }
    cx.measured(worst)
}

fn bianchi(cx: &Context) -> Result<Measurement, CheckError> {
    let gauge = assembled(cx.npo()?)?.as_gauge();
    cx.measured(gauge.bianchi()?.max_norm(cx.points)?)
}

fn phase(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.npo()?;
    let n = sector.fields.n;
    let c = assembled(sector)?;
    let alpha = sampling::random_polynomial(&mut cx.rng(), 2, 3);
    let unit = |a: &Expression| ComplexExpression::new(a.cos(), a.sin());
    let mut l = ComplexMatrix::identity(n + 1);
    let mut l_inv = ComplexMatrix::identity(n + 1);
    l.set(n, n, unit(&alpha));
    l_inv.set(n, n, unit(&-&alpha));
    let moved = c.transform(&BasisChange::with_inverse(l, l_inv))?;
    let d: Vec<ComplexExpression> = (0..DIM5)
        .map(|dir| {
            let expected = c.get(n, n, dir) + &ComplexExpression::imag(alpha.partial(dir));
            moved.get(n, n, dir) - &expected
        })
        .collect();
    cx.measured(max_norm_over(&d, cx.points)?)
}

/// A regular change keeps `L^&_j = 0`; the transpose of a random
/// unit-lower-triangular-times-diagonal change is one.
fn regular_x_slice(cx: &Context) -> Result<Measurement, CheckError> {
    let sector = cx.npo()?;
    let n = sector.fields.n;
    let c = assembled(sector)?;
    let lower = sampling::random_gauge_change(&mut cx.rng(), n + 1);
    let change = BasisChange::with_inverse(lower.l.transpose(), lower.l_inv.transpose());
    let moved = c.transform(&change)?;
    let rule = c.regular_x_slice(&change);
    let d: Vec<ComplexExpression> = (0..DIM5)
        .flat_map(|dir| (0..n).map(move |j| (dir, j)))
        .map(|(dir, j)| moved.get(n, j, dir) - &rule[dir][j])
        .collect();
    let mut worst = max_norm_over(&d, cx.points)?;
    let back = moved.transform(&change.inverse())?;
    for dir in 0..DIM5 {
        worst = worst.max(max_norm_over(&slice_diff(back.slice(dir), c.slice(dir)), cx.points)?);
    }
    cx.measured(worst)
}
