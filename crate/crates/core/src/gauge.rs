//! Five-vector gauge fields `B^i_{jA}` for nonspacetime vectors and their
//! field strengths.
//!
//! `∇̄_A E_i = E_j B^j_{iA}`; the matrix `B_A` has entries
//! `(B_A)_{ij} = B^i_{jA}`. The slice `A = 4` is algebraic and transforms as
//! a rank (1,1) tensor.

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{ComplexExpression, EvalError};
use crate::forms::{self, FormField, FormsError, IndexKind, ValueConnection, ValueSpace};
use crate::linalg::{BasisChange, ComplexMatrix};
use crate::pentavec::BasisDescriptor;
use crate::{sampling, Point, DIM5, FIFTH};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("expected {expected} gauge slices of size {n}x{n}")]
    Shape { expected: usize, n: usize },
    #[error("basis change has size {found}, gauge dimension is {n}")]
    DimensionMismatch { found: usize, n: usize },
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone)]
pub struct GaugeField {
    n: usize,
    b: Vec<ComplexMatrix>,
    pub basis: BasisDescriptor,
}

impl GaugeField {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            b: vec![ComplexMatrix::zeros(n, n); DIM5],
            basis: BasisDescriptor::default(),
        }
    }

    /// Five slices `B_A`, `A = 0..5`.
    pub fn from_slices(b: Vec<ComplexMatrix>) -> Result<Self, GaugeError> {
        let n = b.first().map_or(0, ComplexMatrix::rows);
        if b.len() != DIM5 || b.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(GaugeError::Shape { expected: DIM5, n });
        }
        Ok(Self {
            n,
            b,
            basis: BasisDescriptor::default(),
        })
    }

    /// Four-vector gauge fields `A^i_{jμ}` plus the algebraic slice.
    pub fn from_four(a: &[ComplexMatrix], fifth: ComplexMatrix) -> Result<Self, GaugeError> {
        let mut b = a.to_vec();
        b.push(fifth);
        Self::from_slices(b)
    }

    /// Random polynomial slices of total degree at most `degree`.
    pub fn random(n: usize, rng: &mut impl rand::Rng, degree: u32) -> Self {
        let b = (0..DIM5)
            .map(|_| {
                ComplexMatrix::from_fn(n, n, |_, _| {
                    sampling::random_complex_polynomial(rng, degree, 2)
                })
            })
            .collect();
        Self::from_slices(b).expect("five square slices")
    }

    /// `B_A = θ⁻¹(½∂_A θ + K_A)`, which satisfies the Hermiticity
    /// constraint for Hermitian `θ` and anti-Hermitian `K_A`.
    pub fn compatible(theta: &ComplexMatrix, k: &[ComplexMatrix]) -> Result<Self, GaugeError> {
        if k.len() != DIM5 {
            return Err(GaugeError::Shape {
                expected: DIM5,
                n: theta.rows(),
            });
        }
        let inv = theta.inverse();
        let half = Complex64::new(0.5, 0.0);
        Self::from_slices(
            k.iter()
                .enumerate()
                .map(|(a, ka)| inv.matmul(&theta.partial(a).map(|e| e.scale(half)).add(ka)))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slice(&self, a: usize) -> &ComplexMatrix {
        &self.b[a]
    }

    pub fn slices(&self) -> &[ComplexMatrix] {
        &self.b
    }

    /// `B^i_{jA}`.
    pub fn get(&self, i: usize, j: usize, a: usize) -> &ComplexExpression {
        self.b[a].get(i, j)
    }

    pub fn set(&mut self, i: usize, j: usize, a: usize, value: ComplexExpression) {
        self.b[a].set(i, j, value);
    }

    /// `B'_A = L⁻¹ B_A L + L⁻¹ ∂_A L`.
    pub fn transform(&self, change: &BasisChange<ComplexExpression>) -> Result<Self, GaugeError> {
        if change.dim() != self.n {
            return Err(GaugeError::DimensionMismatch {
                found: change.dim(),
                n: self.n,
            });
        }
        let b = (0..DIM5)
            .map(|a| {
                let conj = change.l_inv.matmul(&self.b[a]).matmul(&change.l);
                let dl = change.l.partial(a);
                if dl.is_zero() {
                    conj
                } else {
                    conj.add(&change.l_inv.matmul(&dl))
                }
            })
            .collect();
        Ok(Self {
            n: self.n,
            b,
            basis: self.basis,
        })
    }

    /// The algebraic slice by the tensorial rule `L⁻¹ B_4 L`.
    pub fn fifth_slice_tensorial(&self, change: &BasisChange<ComplexExpression>) -> ComplexMatrix {
        change.l_inv.matmul(&self.b[FIFTH]).matmul(&change.l)
    }

    /// Entries `∂_A θ_ij - θ_kj (B^k_{iA})* - θ_ik B^k_{jA}`, which vanish
    /// when `∇̄` preserves the Hermitian product `θ`.
    pub fn hermitian_residual_exprs(&self, theta: &ComplexMatrix) -> Vec<ComplexExpression> {
        let mut out = Vec::with_capacity(DIM5 * self.n * self.n);
        for a in 0..DIM5 {
            let b = &self.b[a];
            // (B†θ)_ij = Σ_k conj(B^k_i) θ_kj
            let bdag_theta = b.conj().transpose().matmul(theta);
            let theta_b = theta.matmul(b);
            for i in 0..self.n {
                for j in 0..self.n {
                    out.push(
                        theta.get(i, j).partial(a) - bdag_theta.get(i, j) - theta_b.get(i, j),
                    );
                }
            }
        }
        out
    }

    pub fn hermitian_residual(
        &self,
        theta: &ComplexMatrix,
        points: &[Point],
    ) -> Result<f64, EvalError> {
        crate::expr::max_norm_over(&self.hermitian_residual_exprs(theta), points)
    }

    /// `(∇̄_A s)^i = ∂_A s^i + B^i_{jA} s^j`.
    pub fn cov_deriv(&self, s: &[ComplexExpression], a: usize) -> Vec<ComplexExpression> {
        matvec_plus_partial(&self.b[a], s, a)
    }

    pub fn vector_connection(&self) -> ValueConnection {
        ValueConnection::vector(&self.b)
    }

    pub fn covector_connection(&self) -> ValueConnection {
        ValueConnection::covector(&self.b)
    }

    pub fn operator_connection(&self) -> ValueConnection {
        ValueConnection::operator(&self.b)
    }

    /// `F_AB = ∂_A B_B - ∂_B B_A + B_A B_B - B_B B_A`.
    pub fn field_strength(&self) -> FieldStrength {
        let form = FormField::from_fn(
            IndexKind::Five,
            2,
            ValueSpace::nonspacetime_operator(self.n),
            |k| flatten(&curvature(&self.b[k[0]], &self.b[k[1]], k[0], k[1])),
        )
        .expect("rank 2 fits five indices");
        FieldStrength {
            n: self.n,
            flavor: Flavor::Full,
            form,
        }
    }

    /// `F^∇`: the space-time block of the four-slice curvature, with every
    /// component carrying index 4 identically zero.
    pub fn field_strength_nabla(&self) -> FieldStrength {
        let form = FormField::from_fn(
            IndexKind::Five,
            2,
            ValueSpace::nonspacetime_operator(self.n),
            |k| {
                if k[1] == FIFTH {
                    vec![ComplexExpression::zero(); self.n * self.n]
                } else {
                    flatten(&curvature(&self.b[k[0]], &self.b[k[1]], k[0], k[1]))
                }
            },
        )
        .expect("rank 2 fits five indices");
        FieldStrength {
            n: self.n,
            flavor: Flavor::Nabla,
            form,
        }
    }

    /// `dF` with `B` acting on both value indices.
    pub fn bianchi(&self) -> Result<FormField, GaugeError> {
        let f = self.field_strength();
        Ok(forms::exterior_d(f.form(), Some(&self.operator_connection()))?)
    }

    /// `d^∇ F^∇`.
    pub fn bianchi_nabla(&self) -> Result<FormField, GaugeError> {
        let f = self.field_strength_nabla();
        Ok(forms::exterior_d_nabla(
            f.form(),
            Some(&self.operator_connection()),
        )?)
    }

    /// `dd S - ≺F ∧ S≻` for a vector-valued form `S`.
    pub fn dd_defect(&self, s: &FormField) -> Result<FormField, GaugeError> {
        let conn = self.vector_connection();
        let dd = forms::exterior_d(&forms::exterior_d(s, Some(&conn))?, Some(&conn))?;
        let fs = forms::value_contract(self.field_strength().form(), s)?;
        Ok(dd.sub(&fs)?)
    }

    /// `(∇̄_A ∇̄_B - ∇̄_B ∇̄_A) s - F_AB s` for every `A < B`, computed by
    /// applying the derivative twice.
    pub fn commutator_defect(&self, s: &[ComplexExpression]) -> Vec<ComplexExpression> {
        let f = self.field_strength();
        let mut out = Vec::new();
        for a in 0..DIM5 {
            for b in a + 1..DIM5 {
                let ab = self.cov_deriv(&self.cov_deriv(s, b), a);
                let ba = self.cov_deriv(&self.cov_deriv(s, a), b);
                let fab = f.get(a, b).matvec(s);
                for i in 0..self.n {
                    out.push(&ab[i] - &ba[i] - &fab[i]);
                }
            }
        }
        out
    }
}

fn matvec_plus_partial(
    m: &ComplexMatrix,
    s: &[ComplexExpression],
    a: usize,
) -> Vec<ComplexExpression> {
    (0..s.len())
        .map(|i| {
            let mut acc = s[i].partial(a);
            for (j, sj) in s.iter().enumerate() {
                let mij = m.get(i, j);
                if !mij.is_zero() && !sj.is_zero() {
                    acc = acc + mij * sj;
                }
            }
            acc
        })
        .collect()
}

fn curvature(ba: &ComplexMatrix, bb: &ComplexMatrix, a: usize, b: usize) -> ComplexMatrix {
    let d = bb.partial(a).sub(&ba.partial(b));
    d.add(&ba.matmul(bb)).sub(&bb.matmul(ba))
}

fn flatten(m: &ComplexMatrix) -> Vec<ComplexExpression> {
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.push(m.get(i, j).clone());
        }
    }
    out
}

fn unflatten(values: &[ComplexExpression], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| values[i * n + j].clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Full,
    Nabla,
}

/// Operator-valued 2-form `F^i_{jAB}`.
#[derive(Debug, Clone)]
pub struct FieldStrength {
    n: usize,
    pub flavor: Flavor,
    form: FormField,
}

impl FieldStrength {
    pub fn from_form(form: FormField, flavor: Flavor) -> Option<Self> {
        match *form.space() {
            ValueSpace::Nonspacetime {
                upper: 1,
                lower: 1,
                n,
            } if form.rank() == 2 => Some(Self { n, flavor, form }),
            _ => None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> &FormField {
        &self.form
    }

    /// The matrix `F_AB`, signed for `A > B`.
    pub fn get(&self, a: usize, b: usize) -> ComplexMatrix {
        unflatten(&self.form.component(&[a, b]), self.n)
    }

    /// `L⁻¹ F L`.
    pub fn conjugate(&self, change: &BasisChange<ComplexExpression>) -> Self {
        let form = self.form.map_values(self.form.space().clone(), |v| {
            let m = unflatten(v, self.n);
            flatten(&change.l_inv.matmul(&m).matmul(&change.l))
        });
        Self {
            n: self.n,
            flavor: self.flavor,
            form,
        }
    }

    /// Stored entries `F_{α4}` that are not literally zero.
    pub fn nonzero_fifth_entries(&self) -> usize {
        self.form
            .entries()
            .filter(|(k, _)| k.contains(&FIFTH))
            .map(|(_, v)| v.iter().filter(|x| !x.is_zero()).count())
            .sum()
    }
}
