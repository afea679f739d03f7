//! The (n+1)-vector sector: `W = W^Z ⊕ W^E` with connection coefficients
//! `C^Θ_{ΞA}`, their SU(n)×U(1) decomposition and field strengths.
//!
//! Index `n` (0-based) stands for the E direction `&`; indices `0..n` span
//! `W^Z`. In an orthonormal basis with unit volume form:
//!
//! * `C^i_j = (i/2) g (t_a)^i_j C^a + i g [2n(n+1)]^{-1/2} δ^i_j C⁰`,
//! * `C^&_& = -i g [n/2(n+1)]^{1/2} C⁰`,
//! * `C^i_& = 0`, `C^&_j = g X_j`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{ComplexExpression, Expression};
use crate::forms::{self, FormField, FormsError, IndexKind, ValueConnection, ValueSpace};
use crate::gauge::{GaugeError, GaugeField};
use crate::linalg::{BasisChange, ComplexMatrix, RealMatrix};
use crate::{sampling, DIM5};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NpoError {
    #[error("SU(n) generators need n >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("{what}: expected {expected}, got {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// Hermitian generators of the fundamental representation of SU(n) with
/// `Tr(t_a t_b) = 2δ_ab` and `[t_a, t_b] = 2i t_c f^c_{ab}`.
#[derive(Debug, Clone)]
pub struct SuGenerators {
    pub n: usize,
    pub t: Vec<DMatrix<Complex64>>,
    /// `f^c_{ab}` at `(c * m + a) * m + b`, `m = n² - 1`.
    f: Vec<f64>,
    /// `ε^c_a` with `t_a = t_cᵀ ε^c_a`.
    pub eps: DMatrix<f64>,
}

/// Generalized Gell-Mann matrices: for each pair `j < k` the symmetric and
/// antisymmetric off-diagonal generators, then the `n - 1` diagonal ones.
pub fn su_generators(n: usize) -> Result<SuGenerators, NpoError> {
    if n < 2 {
        return Err(NpoError::DimensionTooSmall(n));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut t = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut sym = DMatrix::from_element(n, n, zero);
            sym[(j, k)] = one;
            sym[(k, j)] = one;
            t.push(sym);
            let mut anti = DMatrix::from_element(n, n, zero);
            anti[(j, k)] = -i;
            anti[(k, j)] = i;
            t.push(anti);
        }
    }
    for l in 1..n {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = DMatrix::from_element(n, n, zero);
        for j in 0..l {
            diag[(j, j)] = one * norm;
        }
        diag[(l, l)] = one * (-(l as f64) * norm);
        t.push(diag);
    }
    let m = t.len();
    let mut f = vec![0.0; m * m * m];
    for a in 0..m {
        for b in 0..m {
            let comm = &t[a] * &t[b] - &t[b] * &t[a];
            for c in 0..m {
                let tr = (&comm * &t[c]).trace();
                f[(c * m + a) * m + b] = (tr / (4.0 * i)).re;
            }
        }
    }
    let eps = DMatrix::from_fn(m, m, |c, a| ((&t[a] * t[c].transpose()).trace() / 2.0).re);
    Ok(SuGenerators { n, t, f, eps })
}

impl SuGenerators {
    pub fn count(&self) -> usize {
        self.t.len()
    }

    /// `f^c_{ab}`.
    pub fn f(&self, c: usize, a: usize, b: usize) -> f64 {
        let m = self.count();
        self.f[(c * m + a) * m + b]
    }

    /// `max |Tr(t_a t_b) - 2δ_ab|`.
    pub fn trace_residual(&self) -> f64 {
        let m = self.count();
        let mut worst = 0.0_f64;
        for a in 0..m {
            for b in 0..m {
                let expected = if a == b { 2.0 } else { 0.0 };
                let tr = (&self.t[a] * &self.t[b]).trace();
                worst = worst.max((tr - expected).norm());
            }
        }
        worst
    }

    /// `max |[t_a, t_b] - 2i t_c f^c_{ab}|` over entries.
    pub fn commutator_residual(&self) -> f64 {
        let m = self.count();
        let two_i = Complex64::new(0.0, 2.0);
        let mut worst = 0.0_f64;
        for a in 0..m {
            for b in 0..m {
                let comm = &self.t[a] * &self.t[b] - &self.t[b] * &self.t[a];
                let mut rhs = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
                for c in 0..m {
                    rhs += &self.t[c] * (two_i * self.f(c, a, b));
                }
                worst = worst.max((comm - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// `max |f^c_{ab} + f^c_{ba}|` and the cyclic defect, which vanish for
    /// totally antisymmetric structure constants.
    pub fn antisymmetry_residual(&self) -> f64 {
        let m = self.count();
        let mut worst = 0.0_f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    worst = worst
                        .max((self.f(c, a, b) + self.f(c, b, a)).abs())
                        .max((self.f(c, a, b) - self.f(a, b, c)).abs());
                }
            }
        }
        worst
    }

    /// `max |Tr t_a|`.
    pub fn tracelessness_residual(&self) -> f64 {
        self.t.iter().map(|m| m.trace().norm()).fold(0.0, f64::max)
    }

    /// `max |t_a - t_cᵀ ε^c_a|`.
    pub fn eps_residual(&self) -> f64 {
        let m = self.count();
        let mut worst = 0.0_f64;
        for a in 0..m {
            let mut rhs = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
            for c in 0..m {
                rhs += self.t[c].transpose() * Complex64::new(self.eps[(c, a)], 0.0);
            }
            worst = worst.max((&self.t[a] - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        worst
    }

    fn t_expr(&self, a: usize) -> ComplexMatrix {
        ComplexMatrix::constant(self.n, self.n, self.t[a].transpose().as_slice())
    }
}

/// Real fields `C^a_A`, `C⁰_A` and complex `X_{jA}` with coupling `g`.
#[derive(Debug, Clone)]
pub struct NpoFields {
    pub n: usize,
    pub g: f64,
    pub ca: Vec<[Expression; DIM5]>,
    pub c0: [Expression; DIM5],
    pub x: Vec<[ComplexExpression; DIM5]>,
}

impl NpoFields {
    pub fn zero(n: usize, g: f64) -> Self {
        Self {
            n,
            g,
            ca: vec![Default::default(); n * n - 1],
            c0: Default::default(),
            x: vec![Default::default(); n],
        }
    }

    /// Random polynomial fields of total degree at most `degree`.
    pub fn random(n: usize, g: f64, rng: &mut impl rand::Rng, degree: u32) -> Self {
        let mut real = || -> [Expression; DIM5] {
            std::array::from_fn(|_| sampling::random_polynomial(rng, degree, 3))
        };
        let ca = (0..n * n - 1).map(|_| real()).collect();
        let c0 = real();
        let x = (0..n)
            .map(|_| {
                let (re, im) = (real(), real());
                std::array::from_fn(|d| ComplexExpression::new(re[d].clone(), im[d].clone()))
            })
            .collect();
        Self { n, g, ca, c0, x }
    }

    fn validate(&self, gens: &SuGenerators) -> Result<(), NpoError> {
        let check = |what, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(NpoError::DimensionMismatch {
                    what,
                    expected,
                    found,
                })
            }
        };
        check("generator dimension", self.n, gens.n)?;
        check("C^a fields", self.n * self.n - 1, self.ca.len())?;
        check("X fields", self.n, self.x.len())
    }

    /// `[2n(n+1)]^{-1/2}`.
    pub fn z_charge(&self) -> f64 {
        let n = self.n as f64;
        (2.0 * n * (n + 1.0)).powf(-0.5)
    }

    /// `[n/2(n+1)]^{1/2}`.
    pub fn e_charge(&self) -> f64 {
        let n = self.n as f64;
        (n / (2.0 * (n + 1.0))).sqrt()
    }

    /// Charge-conjugate fields `C̃⁰ = -C⁰`, `C̃^a = -ε^a_b C^b`, same `X`.
    pub fn conjugated(&self, gens: &SuGenerators) -> Self {
        let m = self.ca.len();
        let ca = (0..m)
            .map(|a| {
                std::array::from_fn(|dir| {
                    let mut acc = Expression::zero();
                    for b in 0..m {
                        let e = gens.eps[(a, b)];
                        if e != 0.0 && !self.ca[b][dir].is_zero() {
                            acc = acc - &self.ca[b][dir] * e;
                        }
                    }
                    acc
                })
            })
            .collect();
        Self {
            n: self.n,
            g: self.g,
            ca,
            c0: std::array::from_fn(|dir| -&self.c0[dir]),
            x: self.x.clone(),
        }
    }

    /// `Σ_a (t_a)^i_j C^a_A` as a matrix.
    fn su_part(&self, gens: &SuGenerators, dir: usize) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for (a, field) in self.ca.iter().enumerate() {
            if field[dir].is_zero() {
                continue;
            }
            let scaled = gens
                .t_expr(a)
                .map(|e| e * &ComplexExpression::real(field[dir].clone()));
            acc = acc.add(&scaled);
        }
        acc
    }
}

/// Coefficients `C^Θ_{ΞA}` as five `(n+1)×(n+1)` matrices.
#[derive(Debug, Clone)]
pub struct NpoConnection {
    pub n: usize,
    c: Vec<ComplexMatrix>,
}

fn i_times(e: &ComplexExpression, k: f64) -> ComplexExpression {
    ComplexExpression::new(&e.im * (-k), &e.re * k)
}

/// Builds the full coefficients from `(C^a, C⁰, X, g)`.
pub fn assemble(fields: &NpoFields, gens: &SuGenerators) -> Result<NpoConnection, NpoError> {
    fields.validate(gens)?;
    let n = fields.n;
    let g = fields.g;
    let amp = n;
    let c = (0..DIM5)
        .map(|dir| {
            let su = fields.su_part(gens, dir);
            let c0 = ComplexExpression::real(fields.c0[dir].clone());
            let mut m = ComplexMatrix::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    let mut entry = i_times(su.get(i, j), 0.5 * g);
                    if i == j {
                        entry = entry + i_times(&c0, g * fields.z_charge());
                    }
                    m.set(i, j, entry);
                }
                m.set(amp, i, fields.x[i][dir].scale(Complex64::new(g, 0.0)));
            }
            m.set(amp, amp, i_times(&c0, -g * fields.e_charge()));
            m
        })
        .collect();
    Ok(NpoConnection { n, c })
}

impl NpoConnection {
    /// Real (n+1)-vectors: a real `W^Z` block and `C^&_& = 0`.
    pub fn real(z_block: &[RealMatrix], x: &[[Expression; DIM5]], g: f64) -> Result<Self, NpoError> {
        let n = z_block.first().map_or(0, RealMatrix::rows);
        if z_block.len() != DIM5 || x.len() != n {
            return Err(NpoError::DimensionMismatch {
                what: "real sector slices",
                expected: DIM5,
                found: z_block.len(),
            });
        }
        let c = (0..DIM5)
            .map(|dir| {
                let mut m = ComplexMatrix::zeros(n + 1, n + 1);
                for i in 0..n {
                    for j in 0..n {
                        m.set(i, j, ComplexExpression::real(z_block[dir].get(i, j).clone()));
                    }
                    m.set(n, i, ComplexExpression::real(&x[i][dir] * g));
                }
                m
            })
            .collect();
        Ok(Self { n, c })
    }

    pub fn from_slices(c: Vec<ComplexMatrix>) -> Result<Self, NpoError> {
        let dim = c.first().map_or(0, ComplexMatrix::rows);
        if c.len() != DIM5 || dim < 2 {
            return Err(NpoError::DimensionMismatch {
                what: "coefficient slices",
                expected: DIM5,
                found: c.len(),
            });
        }
        Ok(Self { n: dim - 1, c })
    }

    pub fn amp(&self) -> usize {
        self.n
    }

    pub fn slice(&self, dir: usize) -> &ComplexMatrix {
        &self.c[dir]
    }

    /// `C^Θ_{ΞA}`.
    pub fn get(&self, theta: usize, xi: usize, dir: usize) -> &ComplexExpression {
        self.c[dir].get(theta, xi)
    }

    /// The full coefficients as an (n+1)-dimensional gauge field.
    pub fn as_gauge(&self) -> GaugeField {
        GaugeField::from_slices(self.c.clone()).expect("five square slices")
    }

    /// The `W^Z` block, i.e. the gauge field of the quotient vectors.
    pub fn z_block(&self) -> GaugeField {
        let n = self.n;
        GaugeField::from_slices(
            self.c
                .iter()
                .map(|m| ComplexMatrix::from_fn(n, n, |i, j| m.get(i, j).clone()))
                .collect(),
        )
        .expect("five square slices")
    }

    /// `C^Θ_{ΘA}` for each direction.
    pub fn trace_exprs(&self) -> Vec<ComplexExpression> {
        self.c
            .iter()
            .map(|m| (0..=self.n).map(|k| m.get(k, k).clone()).sum())
            .collect()
    }

    /// The entries `C^i_{&A}`, zero in a standard basis.
    pub fn standard_constraint_exprs(&self) -> Vec<ComplexExpression> {
        let mut out = Vec::new();
        for m in &self.c {
            for i in 0..self.n {
                out.push(m.get(i, self.n).clone());
            }
        }
        out
    }

    /// `C' = L⁻¹ C_A L + L⁻¹ ∂_A L`.
    pub fn transform(&self, change: &BasisChange<ComplexExpression>) -> Result<Self, NpoError> {
        let moved = self.as_gauge().transform(change)?;
        Ok(Self {
            n: self.n,
            c: moved.slices().to_vec(),
        })
    }

    /// `(L⁻¹)^&_& C^&_{lA} L^l_j` per direction, the X slice after a change
    /// between regular bases (`L^&_j = 0`).
    pub fn regular_x_slice(&self, change: &BasisChange<ComplexExpression>) -> Vec<Vec<ComplexExpression>> {
        let n = self.n;
        let inv_amp = change.l_inv.get(n, n);
        self.c
            .iter()
            .map(|m| {
                (0..n)
                    .map(|j| {
                        let row: ComplexExpression = (0..n)
                            .filter(|&l| !m.get(n, l).is_zero() && !change.l.get(l, j).is_zero())
                            .map(|l| m.get(n, l) * change.l.get(l, j))
                            .sum();
                        inv_amp * &row
                    })
                    .collect()
            })
            .collect()
    }

    /// Generic `∂_A u^Θ + C^Θ_{ΞA} u^Ξ`.
    pub fn cov_deriv(&self, u: &[ComplexExpression], dir: usize) -> Vec<ComplexExpression> {
        let cu = self.c[dir].matvec(u);
        u.iter().zip(cu).map(|(x, y)| x.partial(dir) + y).collect()
    }

    /// Generic `∂_A v_Ξ - v_Θ C^Θ_{ΞA}`.
    pub fn cov_deriv_form(&self, v: &[ComplexExpression], dir: usize) -> Vec<ComplexExpression> {
        let vc = self.c[dir].transpose().matvec(v);
        v.iter().zip(vc).map(|(x, y)| x.partial(dir) - y).collect()
    }

    /// The full field strength `F^Θ_{ΞAB}`.
    pub fn field_strength(&self) -> FormField {
        self.as_gauge().field_strength().form().clone()
    }
}

fn real(e: &Expression) -> ComplexExpression {
    ComplexExpression::real(e.clone())
}

/// Derivative of an (n+1)-vector spelled out by components:
/// `(∇̄u)^i = ∂u^i + (i/2) g t_a u C^a + i g [2n(n+1)]^{-1/2} C⁰ u^i` and
/// `(∇̄u)^& = ∂u^& - i g [n/2(n+1)]^{1/2} C⁰ u^& + g X_j u^j`.
pub fn cov_deriv_components(
    fields: &NpoFields,
    gens: &SuGenerators,
    u: &[ComplexExpression],
    dir: usize,
) -> Vec<ComplexExpression> {
    let n = fields.n;
    let g = fields.g;
    let su = fields.su_part(gens, dir).matvec(&u[..n]);
    let c0 = real(&fields.c0[dir]);
    let mut out: Vec<ComplexExpression> = (0..n)
        .map(|i| u[i].partial(dir) + i_times(&su[i], 0.5 * g) + i_times(&(&c0 * &u[i]), g * fields.z_charge()))
        .collect();
    let mut amp = u[n].partial(dir) - i_times(&(&c0 * &u[n]), g * fields.e_charge());
    for j in 0..n {
        amp = amp + fields.x[j][dir].scale(Complex64::new(g, 0.0)) * &u[j];
    }
    out.push(amp);
    out
}

/// Derivative of a linear form on W spelled out by components:
/// `(∇̄v)_i = ∂v_i - (i/2) g v_j (t_a)^j_i C^a - i g [2n(n+1)]^{-1/2} v_i C⁰ - g v_& X_i`
/// and `(∇̄v)_& = ∂v_& + i g [n/2(n+1)]^{1/2} v_& C⁰`.
pub fn cov_deriv_form_components(
    fields: &NpoFields,
    gens: &SuGenerators,
    v: &[ComplexExpression],
    dir: usize,
) -> Vec<ComplexExpression> {
    let n = fields.n;
    let g = fields.g;
    let vt = fields.su_part(gens, dir).transpose().matvec(&v[..n]);
    let c0 = real(&fields.c0[dir]);
    let mut out: Vec<ComplexExpression> = (0..n)
        .map(|i| {
            v[i].partial(dir)
                - i_times(&vt[i], 0.5 * g)
                - i_times(&(&v[i] * &c0), g * fields.z_charge())
                - (&v[n] * &fields.x[i][dir]).scale(Complex64::new(g, 0.0))
        })
        .collect();
    out.push(v[n].partial(dir) + i_times(&(&v[n] * &c0), g * fields.e_charge()));
    out
}

/// Derivative of `u` relabelled with lower indices `u_Θ = u^Θ`, written
/// with the conjugate fields `tilde`:
/// `(∇̄u)_i = ∂u_i - (i/2) g u_j (t_a)^j_i C̃^a - i g [2n(n+1)]^{-1/2} u_i C̃⁰`,
/// `(∇̄u)_& = ∂u_& + i g [n/2(n+1)]^{1/2} u_& C̃⁰ + g u_j X^j`.
pub fn cov_deriv_relabelled(
    tilde: &NpoFields,
    gens: &SuGenerators,
    u: &[ComplexExpression],
    dir: usize,
) -> Vec<ComplexExpression> {
    let n = tilde.n;
    let g = tilde.g;
    let ut = tilde.su_part(gens, dir).transpose().matvec(&u[..n]);
    let c0 = real(&tilde.c0[dir]);
    let mut out: Vec<ComplexExpression> = (0..n)
        .map(|i| {
            u[i].partial(dir)
                - i_times(&ut[i], 0.5 * g)
                - i_times(&(&u[i] * &c0), g * tilde.z_charge())
        })
        .collect();
    let mut amp = u[n].partial(dir) + i_times(&(&u[n] * &c0), g * tilde.e_charge());
    for j in 0..n {
        amp = amp + (&u[j] * &tilde.x[j][dir]).scale(Complex64::new(g, 0.0));
    }
    out.push(amp);
    out
}

/// Difference between the relabelled derivative of `u` and the linear-form
/// derivative rule applied to `u` under the conjugate fields, for every
/// direction and component. Zero iff the X coupling is C-invariant on `u`.
pub fn charge_asymmetry_exprs(
    fields: &NpoFields,
    gens: &SuGenerators,
    u: &[ComplexExpression],
) -> Vec<ComplexExpression> {
    let tilde = fields.conjugated(gens);
    let mut out = Vec::new();
    for dir in 0..DIM5 {
        let relabelled = cov_deriv_relabelled(&tilde, gens, u, dir);
        let as_form = cov_deriv_form_components(&tilde, gens, u, dir);
        out.extend(relabelled.iter().zip(&as_form).map(|(a, b)| a - b));
    }
    out
}

/// `F^a_{AB} = ∂_A C^a_B - ∂_B C^a_A - g f^a_{bc} C^b_A C^c_B`.
pub fn su_field_strength(fields: &NpoFields, gens: &SuGenerators, a: usize, x: usize, y: usize) -> Expression {
    let m = fields.ca.len();
    let mut acc = fields.ca[a][y].partial(x) - fields.ca[a][x].partial(y);
    for b in 0..m {
        if fields.ca[b][x].is_zero() {
            continue;
        }
        for c in 0..m {
            let f = gens.f(a, b, c);
            if f.abs() < 1e-15 || fields.ca[c][y].is_zero() {
                continue;
            }
            acc = acc - &fields.ca[b][x] * &fields.ca[c][y] * (fields.g * f);
        }
    }
    acc
}

/// `F⁰_{AB} = ∂_A C⁰_B - ∂_B C⁰_A`.
pub fn u1_field_strength(fields: &NpoFields, x: usize, y: usize) -> Expression {
    fields.c0[y].partial(x) - fields.c0[x].partial(y)
}

/// Block `F^i_j = (ig/2)(t_a)^i_j F^a + i g [2n(n+1)]^{-1/2} δ^i_j F⁰`.
pub fn block_zz(fields: &NpoFields, gens: &SuGenerators) -> FormField {
    let n = fields.n;
    let g = fields.g;
    FormField::from_fn(IndexKind::Five, 2, ValueSpace::nonspacetime_operator(n), |k| {
        let (x, y) = (k[0], k[1]);
        let fa: Vec<Expression> = (0..gens.count())
            .map(|a| su_field_strength(fields, gens, a, x, y))
            .collect();
        let f0 = real(&u1_field_strength(fields, x, y));
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut su = ComplexExpression::zero();
                for (a, fa) in fa.iter().enumerate() {
                    let t = gens.t[a][(i, j)];
                    if t.norm() == 0.0 || fa.is_zero() {
                        continue;
                    }
                    su = su + real(fa).scale(t);
                }
                let mut entry = i_times(&su, 0.5 * g);
                if i == j {
                    entry = entry + i_times(&f0, g * fields.z_charge());
                }
                values.push(entry);
            }
        }
        values
    })
    .expect("rank 2 fits five indices")
}

/// Block `F^&_& = -i g [n/2(n+1)]^{1/2} F⁰`.
pub fn block_ee(fields: &NpoFields) -> FormField {
    FormField::from_fn(IndexKind::Five, 2, ValueSpace::Scalar, |k| {
        vec![i_times(
            &real(&u1_field_strength(fields, k[0], k[1])),
            -fields.g * fields.e_charge(),
        )]
    })
    .expect("rank 2 fits five indices")
}

/// Value connection on `X̃`: anti-fundamental SU(n) action plus the U(1)
/// charge difference,
/// `(∇_A X)_j = ∂_A X_j - (ig/2) X_k (t_a)^k_j C^a_A - i g [(n+1)/2n]^{1/2} C⁰_A X_j`.
pub fn x_connection(fields: &NpoFields, gens: &SuGenerators) -> ValueConnection {
    let n = fields.n;
    let g = fields.g;
    let charge = ((n as f64 + 1.0) / (2.0 * n as f64)).sqrt();
    let gamma = (0..DIM5)
        .map(|dir| {
            let su_t = fields.su_part(gens, dir).transpose();
            let c0 = real(&fields.c0[dir]);
            ComplexMatrix::from_fn(n, n, |j, k| {
                let mut entry = i_times(su_t.get(j, k), -0.5 * g);
                if j == k {
                    entry = entry + i_times(&c0, -g * charge);
                }
                entry
            })
        })
        .collect();
    ValueConnection::new(ValueSpace::nonspacetime_covector(n), gamma)
}

/// `X̃` as a five-vector 1-form with values `X_{jA}`.
pub fn x_form(fields: &NpoFields) -> FormField {
    FormField::from_fn(
        IndexKind::Five,
        1,
        ValueSpace::nonspacetime_covector(fields.n),
        |k| fields.x.iter().map(|xj| xj[k[0]].clone()).collect(),
    )
    .expect("rank 1")
}

/// Block `F^&_j = g (dX̃)_j`.
pub fn block_ez(fields: &NpoFields, gens: &SuGenerators) -> Result<FormField, NpoError> {
    let dx = forms::exterior_d(&x_form(fields), Some(&x_connection(fields, gens)))?;
    Ok(dx.scale(fields.g))
}

/// Extracts the block `(rows, cols)` of an (n+1)-operator-valued 2-form.
pub fn extract_block(
    f: &FormField,
    n: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> FormField {
    let dim = n + 1;
    let (r, c) = (rows.clone(), cols.clone());
    let space = match (r.len(), c.len()) {
        (1, 1) => ValueSpace::Scalar,
        (1, k) if k == n => ValueSpace::nonspacetime_covector(n),
        (k, 1) if k == n => ValueSpace::nonspacetime_vector(n),
        (k, l) if k == n && l == n => ValueSpace::nonspacetime_operator(n),
        _ => ValueSpace::Product(
            Box::new(ValueSpace::nonspacetime_vector(r.len())),
            Box::new(ValueSpace::nonspacetime_covector(c.len())),
        ),
    };
    f.map_values(space, move |v| {
        let mut out = Vec::new();
        for i in rows.clone() {
            for j in cols.clone() {
                out.push(v[i * dim + j].clone());
            }
        }
        out
    })
}
