//! Five-vector connection coefficients `H^C_{BA}` and the derivatives they
//! define.
//!
//! The last index of `H^C_{BA}` is the differentiation direction:
//! `∇̄_A e_B = e_C H^C_{BA}`. In a standard basis `H^α_{4B} = 0` for every
//! space-time `α`, and the slice `H^C_{B4}` is the purely algebraic part of
//! `∇̄`.

use nalgebra::{Matrix4, Matrix5, Vector4, Vector5};
use thiserror::Error;

use crate::expr::{EvalError, Expression};
use crate::linalg::{BasisChange, RealMatrix};
use crate::pentavec::{
    causal_class, BasisDescriptor, CausalClass, FiveVector, LiftConvention, MetricField, MetricG,
    PentavecError,
};
use crate::sampling::{ChartBox, PointSampler};
use crate::{Point, DIM5, FIFTH};

/// Five symbolic components `v^A`.
pub type VectorField = [Expression; 5];
/// Five symbolic components `s_A` of a linear-form field.
pub type CovectorField = [Expression; 5];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error("tensor rank ({upper},{lower}) exceeds the supported (2,2)")]
    UnsupportedRank { upper: usize, lower: usize },
    #[error("direction {0:?} is not a future timelike or null Z-vector")]
    NotFutureCone([f64; 4]),
    #[error("no sampled pair of future vectors has a nonzero bracket ‖u+v‖ - ‖u‖ - ‖v‖")]
    DegeneratePair,
    #[error("basis change mixes E into the space-time directions (L^α_4 is not zero)")]
    NotStandardToStandard,
    #[error("basis vectors do not span space-time")]
    SingularBasis,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Pentavec(#[from] PentavecError),
}

fn idx(c: usize, b: usize, a: usize) -> usize {
    (c * DIM5 + b) * DIM5 + a
}

/// The coefficient field `H^C_{BA}`.
///
/// `frame` holds `E^μ_A` with `e_A = E^μ_A ∂_μ`, so the derivative index
/// `A` differentiates along `e_A`; `None` is the coordinate frame. Row 4 of
/// `E` never contributes a derivative.
#[derive(Debug, Clone)]
pub struct Connection {
    coeffs: Vec<Expression>,
    frame: Option<RealMatrix>,
    pub basis: BasisDescriptor,
}

impl Connection {
    pub fn zero(basis: BasisDescriptor) -> Self {
        Self {
            coeffs: vec![Expression::zero(); DIM5 * DIM5 * DIM5],
            frame: None,
            basis,
        }
    }

    pub fn from_fn(
        basis: BasisDescriptor,
        mut f: impl FnMut(usize, usize, usize) -> Expression,
    ) -> Self {
        let mut h = Self::zero(basis);
        for c in 0..DIM5 {
            for b in 0..DIM5 {
                for a in 0..DIM5 {
                    h.coeffs[idx(c, b, a)] = f(c, b, a);
                }
            }
        }
        h
    }

    /// Random polynomial coefficients. In a standard basis the entries
    /// `H^α_{4B}` are left zero.
    pub fn random(basis: BasisDescriptor, rng: &mut impl rand::Rng, degree: u32) -> Self {
        Self::from_fn(basis, |c, b, _| {
            if basis.is_standard() && c < FIFTH && b == FIFTH {
                Expression::zero()
            } else {
                crate::sampling::random_polynomial(rng, degree, 2)
            }
        })
    }

    /// `E^μ_A`, identity for the coordinate frame.
    pub fn frame(&self) -> RealMatrix {
        self.frame.clone().unwrap_or_else(|| RealMatrix::identity(DIM5))
    }

    /// Derivative of `e` along the frame vector `e_A`.
    pub fn frame_partial(&self, e: &Expression, a: usize) -> Expression {
        match &self.frame {
            None => e.partial(a),
            Some(frame) => {
                let mut acc = Expression::zero();
                for mu in 0..FIFTH {
                    let coef = frame.get(mu, a);
                    if coef.is_zero() {
                        continue;
                    }
                    let d = e.partial(mu);
                    if !d.is_zero() {
                        acc = acc + coef * d;
                    }
                }
                acc
            }
        }
    }

    /// `H^C_{BA}`.
    pub fn get(&self, c: usize, b: usize, a: usize) -> &Expression {
        &self.coeffs[idx(c, b, a)]
    }

    pub fn set(&mut self, c: usize, b: usize, a: usize, value: Expression) {
        self.coeffs[idx(c, b, a)] = value;
    }

    /// Levi-Civita coefficients of the space-time block of `g`, with every
    /// coefficient that carries index 4 set to zero.
    pub fn levi_civita(metric: &MetricField, basis: BasisDescriptor) -> Self {
        let g = metric.spacetime_block();
        let g_inv = g.inverse();
        let dg: Vec<RealMatrix> = (0..4).map(|mu| g.partial(mu)).collect();
        let mut h = Self::zero(basis);
        for s in 0..4 {
            for n in 0..4 {
                for m in 0..4 {
                    let mut acc = Expression::zero();
                    for l in 0..4 {
                        let gi = g_inv.get(s, l);
                        if gi.is_zero() {
                            continue;
                        }
                        let bracket =
                            dg[m].get(l, n) + dg[n].get(l, m) - dg[l].get(n, m);
                        if bracket.is_zero() {
                            continue;
                        }
                        acc = acc + gi * bracket;
                    }
                    h.set(s, n, m, acc * 0.5);
                }
            }
        }
        h
    }

    /// The matrix `M^C_B = H^C_{BA}` for a fixed direction `A`.
    pub fn slice(&self, a: usize) -> RealMatrix {
        RealMatrix::from_fn(DIM5, DIM5, |c, b| self.get(c, b, a).clone())
    }

    /// Copy with the algebraic slice `H^C_{B4}` zeroed.
    pub fn suppress_fifth(&self) -> Self {
        let mut h = self.clone();
        for c in 0..DIM5 {
            for b in 0..DIM5 {
                h.set(c, b, FIFTH, Expression::zero());
            }
        }
        h
    }

    /// Entries `H^α_{4B}` that are not literally zero.
    pub fn standard_constraint_entries(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for alpha in 0..4 {
            for b in 0..DIM5 {
                if !self.get(alpha, FIFTH, b).is_zero() {
                    out.push((alpha, FIFTH, b));
                }
            }
        }
        out
    }

    /// The expressions `H^α_{4B}`, which vanish in a standard basis.
    pub fn standard_constraint_exprs(&self) -> Vec<Expression> {
        let mut out = Vec::with_capacity(4 * DIM5);
        for alpha in 0..4 {
            for b in 0..DIM5 {
                out.push(self.get(alpha, FIFTH, b).clone());
            }
        }
        out
    }

    pub fn eval(&self, p: &Point) -> Result<ConnectionValues, EvalError> {
        let mut h = [0.0; DIM5 * DIM5 * DIM5];
        for (slot, e) in h.iter_mut().zip(&self.coeffs) {
            *slot = e.eval(p)?;
        }
        Ok(ConnectionValues { h })
    }

    /// `(∇̄_A v)^C = ∂_A v^C + H^C_{BA} v^B`.
    pub fn cov_deriv_vector(&self, v: &VectorField, a: usize) -> VectorField {
        std::array::from_fn(|c| {
            let mut acc = self.frame_partial(&v[c], a);
            for (b, vb) in v.iter().enumerate() {
                let h = self.get(c, b, a);
                if !h.is_zero() && !vb.is_zero() {
                    acc = acc + h * vb;
                }
            }
            acc
        })
    }

    /// `(∇̄_A s)_B = ∂_A s_B - s_C H^C_{BA}`.
    pub fn cov_deriv_covector(&self, s: &CovectorField, a: usize) -> CovectorField {
        std::array::from_fn(|b| {
            let mut acc = self.frame_partial(&s[b], a);
            for (c, sc) in s.iter().enumerate() {
                let h = self.get(c, b, a);
                if !h.is_zero() && !sc.is_zero() {
                    acc = acc - sc * h;
                }
            }
            acc
        })
    }

    /// `∇̄_w v = w^A ∇̄_A v`.
    pub fn directional(&self, v: &VectorField, w: &VectorField) -> VectorField {
        let mut out: VectorField = Default::default();
        for (a, wa) in w.iter().enumerate() {
            if wa.is_zero() {
                continue;
            }
            let d = self.cov_deriv_vector(v, a);
            for c in 0..DIM5 {
                out[c] = &out[c] + wa * &d[c];
            }
        }
        out
    }

    /// Covariant derivative of a tensor field of rank up to (2,2): one `+H`
    /// term per upper index and one `-H` term per lower index.
    pub fn cov_deriv_tensor(&self, m: &Tensor, a: usize) -> Result<Tensor, ConnectionError> {
        if m.upper > 2 || m.lower > 2 {
            return Err(ConnectionError::UnsupportedRank {
                upper: m.upper,
                lower: m.lower,
            });
        }
        let rank = m.rank();
        let mut out = Tensor::zero(m.upper, m.lower);
        for flat in 0..m.comps.len() {
            let index = m.unflatten(flat);
            let mut acc = self.frame_partial(&m.comps[flat], a);
            for slot in 0..rank {
                for d in 0..DIM5 {
                    let mut moved = index.clone();
                    moved[slot] = d;
                    let other = m.get(&moved);
                    if other.is_zero() {
                        continue;
                    }
                    if slot < m.upper {
                        let h = self.get(index[slot], d, a);
                        if !h.is_zero() {
                            acc = acc + h * other;
                        }
                    } else {
                        let h = self.get(d, index[slot], a);
                        if !h.is_zero() {
                            acc = acc - h * other;
                        }
                    }
                }
            }
            out.comps[flat] = acc;
        }
        Ok(out)
    }

    /// Coefficients in the basis `e'_A = e_B L^B_A`:
    /// `H'^A_{BC} = (L⁻¹)^A_D H^D_{EF} L^E_B L^F_C + (L⁻¹)^A_D ∂_F L^D_B L^F_C`,
    /// with `∂_F` the derivative along the current `e_F`. The result carries
    /// the frame `E L`.
    pub fn transform(&self, change: &BasisChange<Expression>, target: BasisDescriptor) -> Self {
        let l = &change.l;
        let l_inv = &change.l_inv;
        let dl: Vec<RealMatrix> = (0..DIM5)
            .map(|f| l.map(|e| self.frame_partial(e, f)))
            .collect();
        // T^D_{BF} = H^D_{EF} L^E_B + ∂_F L^D_B
        let mut t = Self::zero(target);
        for d in 0..DIM5 {
            for b in 0..DIM5 {
                for f in 0..DIM5 {
                    let mut acc = dl[f].get(d, b).clone();
                    for e in 0..DIM5 {
                        let h = self.get(d, e, f);
                        let le = l.get(e, b);
                        if !h.is_zero() && !le.is_zero() {
                            acc = acc + h * le;
                        }
                    }
                    t.set(d, b, f, acc);
                }
            }
        }
        // U^D_{BC} = T^D_{BF} L^F_C
        let mut u = Self::zero(target);
        for d in 0..DIM5 {
            for b in 0..DIM5 {
                for c in 0..DIM5 {
                    let mut acc = Expression::zero();
                    for f in 0..DIM5 {
                        let tv = t.get(d, b, f);
                        let lf = l.get(f, c);
                        if !tv.is_zero() && !lf.is_zero() {
                            acc = acc + tv * lf;
                        }
                    }
                    u.set(d, b, c, acc);
                }
            }
        }
        let mut out = Self::from_fn(target, |a, b, c| {
            let mut acc = Expression::zero();
            for d in 0..DIM5 {
                let li = l_inv.get(a, d);
                let uv = u.get(d, b, c);
                if !li.is_zero() && !uv.is_zero() {
                    acc = acc + li * uv;
                }
            }
            acc
        });
        out.frame = Some(match &self.frame {
            None => l.clone(),
            Some(frame) => frame.matmul(l),
        });
        out
    }

    /// The fifth slice computed by the tensorial rule
    /// `H'^A_{B4} = (L⁻¹)^A_D H^D_{E4} L^E_B L^4_4`, valid between standard
    /// bases only.
    pub fn fifth_slice_tensorial(
        &self,
        change: &BasisChange<Expression>,
    ) -> Result<RealMatrix, ConnectionError> {
        if (0..4).any(|alpha| !change.l.get(alpha, FIFTH).is_zero()) {
            return Err(ConnectionError::NotStandardToStandard);
        }
        let l44 = change.l.get(FIFTH, FIFTH).clone();
        let conj = change
            .l_inv
            .matmul(&self.slice(FIFTH))
            .matmul(&change.l);
        Ok(conj.map(|e| e * &l44))
    }

    /// Components `∂_A g_BC - g_DC H^D_{BA} - g_BD H^D_{CA}` of `∇̄g`,
    /// indexed `(A, B, C)` row-major.
    pub fn metric_compat_exprs(&self, metric: &MetricField) -> Vec<Expression> {
        let g = &metric.g;
        let mut out = Vec::with_capacity(DIM5 * DIM5 * DIM5);
        for a in 0..DIM5 {
            for b in 0..DIM5 {
                for c in 0..DIM5 {
                    let mut acc = self.frame_partial(g.get(b, c), a);
                    for d in 0..DIM5 {
                        let (gdc, hdb) = (g.get(d, c), self.get(d, b, a));
                        if !gdc.is_zero() && !hdb.is_zero() {
                            acc = acc - gdc * hdb;
                        }
                        let (gbd, hdc) = (g.get(b, d), self.get(d, c, a));
                        if !gbd.is_zero() && !hdc.is_zero() {
                            acc = acc - gbd * hdc;
                        }
                    }
                    out.push(acc);
                }
            }
        }
        out
    }

    /// Largest `|∇̄g|` component over `points`.
    pub fn metric_compat_residual(
        &self,
        metric: &MetricField,
        points: &[Point],
    ) -> Result<f64, EvalError> {
        crate::expr::max_abs_over(&self.metric_compat_exprs(metric), points)
    }
}

/// Rank `(upper, lower)` five-tensor field, upper indices first.
#[derive(Debug, Clone)]
pub struct Tensor {
    pub upper: usize,
    pub lower: usize,
    pub comps: Vec<Expression>,
}

impl Tensor {
    pub fn zero(upper: usize, lower: usize) -> Self {
        Self {
            upper,
            lower,
            comps: vec![Expression::zero(); DIM5.pow((upper + lower) as u32)],
        }
    }

    pub fn scalar(f: Expression) -> Self {
        Self {
            upper: 0,
            lower: 0,
            comps: vec![f],
        }
    }

    pub fn vector(v: &VectorField) -> Self {
        Self {
            upper: 1,
            lower: 0,
            comps: v.to_vec(),
        }
    }

    pub fn covector(s: &CovectorField) -> Self {
        Self {
            upper: 0,
            lower: 1,
            comps: s.to_vec(),
        }
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    fn flatten(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| acc * DIM5 + i)
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.rank()];
        for slot in (0..self.rank()).rev() {
            index[slot] = flat % DIM5;
            flat /= DIM5;
        }
        index
    }

    pub fn get(&self, index: &[usize]) -> &Expression {
        &self.comps[self.flatten(index)]
    }

    /// `(m ⊗ n)^{a b}_{c d} = m^a_c n^b_d`: upper indices of `self` then of
    /// `other`, likewise for lower indices.
    pub fn outer(&self, other: &Tensor) -> Tensor {
        let mut out = Tensor::zero(self.upper + other.upper, self.lower + other.lower);
        for flat in 0..out.comps.len() {
            let index = out.unflatten(flat);
            let mut mi: Vec<usize> = index[..self.upper].to_vec();
            let mut ni: Vec<usize> = index[self.upper..self.upper + other.upper].to_vec();
            let lo = self.upper + other.upper;
            mi.extend_from_slice(&index[lo..lo + self.lower]);
            ni.extend_from_slice(&index[lo + self.lower..]);
            out.comps[flat] = self.get(&mi) * other.get(&ni);
        }
        out
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!((self.upper, self.lower), (other.upper, other.lower));
        Tensor {
            upper: self.upper,
            lower: self.lower,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        assert_eq!((self.upper, self.lower), (other.upper, other.lower));
        Tensor {
            upper: self.upper,
            lower: self.lower,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// `H^C_{BA}` evaluated at one point.
#[derive(Debug, Clone, Copy)]
pub struct ConnectionValues {
    h: [f64; DIM5 * DIM5 * DIM5],
}

impl ConnectionValues {
    pub fn get(&self, c: usize, b: usize, a: usize) -> f64 {
        self.h[idx(c, b, a)]
    }

    /// `M^C_B = H^C_{BA}`.
    pub fn slice(&self, a: usize) -> Matrix5<f64> {
        Matrix5::from_fn(|c, b| self.get(c, b, a))
    }

    /// `M^C_B = w^A H^C_{BA}`.
    pub fn contract_direction(&self, w: &Vector5<f64>) -> Matrix5<f64> {
        (0..DIM5).fold(Matrix5::zeros(), |acc, a| acc + self.slice(a) * w[a])
    }
}

/// First-order operator `v ↦ dir^μ ∂_μ v + mat · v` acting on five-vector
/// fields at a fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDiffOp {
    pub dir: Vector4<f64>,
    pub mat: Matrix5<f64>,
}

impl LinearDiffOp {
    pub fn zero() -> Self {
        Self {
            dir: Vector4::zeros(),
            mat: Matrix5::zeros(),
        }
    }

    pub fn apply(&self, v: &VectorField, p: &Point) -> Result<Vector5<f64>, EvalError> {
        let mut out = Vector5::zeros();
        for c in 0..DIM5 {
            let mut acc = 0.0;
            for mu in 0..4 {
                if self.dir[mu] != 0.0 {
                    acc += self.dir[mu] * v[c].partial(mu).eval(p)?;
                }
            }
            out[c] = acc;
        }
        let mut vals = Vector5::zeros();
        for b in 0..DIM5 {
            vals[b] = v[b].eval(p)?;
        }
        Ok(out + self.mat * vals)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            dir: self.dir * k,
            mat: self.mat * k,
        }
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        let d = (self.dir - other.dir).amax();
        let m = (self.mat - other.mat).amax();
        d.max(m)
    }
}

impl std::ops::Add for LinearDiffOp {
    type Output = LinearDiffOp;
    fn add(self, rhs: Self) -> Self {
        Self {
            dir: self.dir + rhs.dir,
            mat: self.mat + rhs.mat,
        }
    }
}

impl std::ops::Sub for LinearDiffOp {
    type Output = LinearDiffOp;
    fn sub(self, rhs: Self) -> Self {
        Self {
            dir: self.dir - rhs.dir,
            mat: self.mat - rhs.mat,
        }
    }
}

/// `D(u) = ∇̄_{ŭ}` at one point, with `ŭ` the homogeneous lift of `u`.
#[derive(Debug, Clone, Copy)]
pub struct DOperator {
    pub h: ConnectionValues,
    pub g: MetricG,
    pub convention: LiftConvention,
    pub basis: BasisDescriptor,
}

impl DOperator {
    pub fn new(
        h: ConnectionValues,
        g: MetricG,
        convention: LiftConvention,
        basis: BasisDescriptor,
    ) -> Self {
        Self {
            h,
            g,
            convention,
            basis,
        }
    }

    pub fn at(
        connection: &Connection,
        metric: &MetricField,
        convention: LiftConvention,
        p: &Point,
    ) -> Result<Self, EvalError> {
        Ok(Self::new(
            connection.eval(p)?,
            metric.eval(p)?,
            convention,
            connection.basis,
        ))
    }

    /// `‖u‖` for a space-time vector.
    pub fn norm(&self, u: &[f64; 4]) -> f64 {
        self.g.norm4(u)
    }

    /// `D(u)` for `u` in the future cone Z⁺.
    pub fn d(&self, u: &[f64; 4]) -> Result<LinearDiffOp, ConnectionError> {
        let z = FiveVector::from_z(*u, self.basis);
        if causal_class(&z, &self.g) != CausalClass::FutureTimelikeOrNull {
            return Err(ConnectionError::NotFutureCone(*u));
        }
        let lift = crate::pentavec::homogeneous_lift(
            &z,
            CausalClass::FutureTimelikeOrNull,
            self.convention,
            &self.g,
        )?;
        Ok(LinearDiffOp {
            dir: Vector4::from(*u),
            mat: self.h.contract_direction(&lift.c),
        })
    }

    /// `Λ(u,v) = D(u+v) - D(u) - D(v)`.
    pub fn lambda(&self, u: &[f64; 4], v: &[f64; 4]) -> Result<LinearDiffOp, ConnectionError> {
        let w = std::array::from_fn(|mu| u[mu] + v[mu]);
        Ok(self.d(&w)? - self.d(u)? - self.d(v)?)
    }

    /// `φ(u,v) = ‖u+v‖ - ‖u‖ - ‖v‖`.
    pub fn phi(&self, u: &[f64; 4], v: &[f64; 4]) -> f64 {
        let w: [f64; 4] = std::array::from_fn(|mu| u[mu] + v[mu]);
        self.norm(&w) - self.norm(u) - self.norm(v)
    }

    /// Extracts `Δ` from `Λ(u,v) = φ(u,v) Δ` and `Δ'_α = D(e_α) - ‖e_α‖ Δ`.
    /// The pair `(u, v)` is the sampled pair with the largest `|φ|`.
    pub fn decompose(
        &self,
        frame: [[f64; 4]; 4],
        seed: u64,
        samples: usize,
    ) -> Result<DDecomposition, ConnectionError> {
        let cone = future_cone_samples(&self.g, seed, 2 * samples.max(1))?;
        let mut best: Option<(f64, [f64; 4], [f64; 4])> = None;
        for pair in cone.chunks_exact(2) {
            let phi = self.phi(&pair[0], &pair[1]);
            if best.is_none_or(|(b, _, _)| phi.abs() > b.abs()) {
                best = Some((phi, pair[0], pair[1]));
            }
        }
        let (phi, u, v) = best.ok_or(ConnectionError::DegeneratePair)?;
        if phi.abs() < 1e-6 {
            return Err(ConnectionError::DegeneratePair);
        }
        let delta = self.lambda(&u, &v)?.mat / phi;
        let mut delta_prime = [LinearDiffOp::zero(); 4];
        for (alpha, e) in frame.iter().enumerate() {
            let d = self.d(e)?;
            delta_prime[alpha] = LinearDiffOp {
                dir: d.dir,
                mat: d.mat - delta * self.norm(e),
            };
        }
        let columns = Matrix4::from_fn(|mu, alpha| frame[alpha][mu]);
        let frame_inv = columns
            .try_inverse()
            .ok_or(ConnectionError::SingularBasis)?;
        Ok(DDecomposition {
            delta_prime,
            delta,
            frame,
            frame_inv,
            g: self.g,
        })
    }
}

/// `D(u) = u^α Δ'_α + ‖u‖ Δ` with `u^α` the components of `u` in `frame`.
#[derive(Debug, Clone, Copy)]
pub struct DDecomposition {
    pub delta_prime: [LinearDiffOp; 4],
    pub delta: Matrix5<f64>,
    pub frame: [[f64; 4]; 4],
    frame_inv: Matrix4<f64>,
    g: MetricG,
}

impl DDecomposition {
    /// Components `u^α` with `u = u^α e_α`.
    pub fn frame_components(&self, u: &[f64; 4]) -> Vector4<f64> {
        self.frame_inv * Vector4::from(*u)
    }

    pub fn reconstruct(&self, u: &[f64; 4]) -> LinearDiffOp {
        self.reconstruct_shifted(u, &[0.0; 4])
    }

    /// Reconstruction after the shift `Δ'_α → Δ'_α + X_α Δ`,
    /// `ϱ(u) → ‖u‖ - u^α X_α`.
    pub fn reconstruct_shifted(&self, u: &[f64; 4], x: &[f64; 4]) -> LinearDiffOp {
        let c = self.frame_components(u);
        let mut op = LinearDiffOp::zero();
        let mut rho = self.g.norm4(u);
        for alpha in 0..4 {
            let shifted = LinearDiffOp {
                dir: self.delta_prime[alpha].dir,
                mat: self.delta_prime[alpha].mat + self.delta * x[alpha],
            };
            op = op + shifted.scale(c[alpha]);
            rho -= c[alpha] * x[alpha];
        }
        op.mat += self.delta * rho;
        op
    }
}

/// Future-directed null frame `f0, f0 + f1, f0 + f2, f0 + f3` built from a
/// `g`-orthonormal frame obtained by Gram-Schmidt on the coordinate vectors.
/// For the Minkowski metric this is `(1,0,0,0), (1,1,0,0), (1,0,1,0),
/// (1,0,0,1)`.
pub fn null_frame(g: &MetricG) -> Option<[[f64; 4]; 4]> {
    let block = g.g.fixed_view::<4, 4>(0, 0).into_owned();
    let dot = |a: &Vector4<f64>, b: &Vector4<f64>| (a.transpose() * block * b)[(0, 0)];
    let mut ortho: Vec<Vector4<f64>> = Vec::with_capacity(4);
    for mu in 0..4 {
        let mut v = Vector4::zeros();
        v[mu] = 1.0;
        for f in &ortho {
            let ff = dot(f, f);
            v -= f * (dot(f, &v) / ff);
        }
        let q = dot(&v, &v);
        let expected_positive = mu == 0;
        if (q > 0.0) != expected_positive || q == 0.0 {
            return None;
        }
        ortho.push(v / q.abs().sqrt());
    }
    if ortho[0][0] < 0.0 {
        ortho[0] = -ortho[0];
    }
    let f0 = ortho[0];
    let mut frame = [[0.0; 4]; 4];
    frame[0] = f0.into();
    for i in 1..4 {
        frame[i] = (f0 + ortho[i]).into();
    }
    Some(frame)
}

/// Deterministic quasi-random vectors of the closed future cone of `g`.
pub fn future_cone_samples(
    g: &MetricG,
    seed: u64,
    count: usize,
) -> Result<Vec<[f64; 4]>, ConnectionError> {
    let chart = ChartBox::new([0.0, -1.0, -1.0, -1.0], [2.0, 1.0, 1.0, 1.0]);
    let basis = BasisDescriptor::default();
    PointSampler::new(chart, seed)
        .sample(count, |u| {
            let z = FiveVector::from_z(*u, basis);
            u[0] > 0.0 && causal_class(&z, g) == CausalClass::FutureTimelikeOrNull
        })
        .map_err(|_| ConnectionError::DegeneratePair)
}
