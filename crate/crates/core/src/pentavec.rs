//! Five-vector algebra at a point: bases, the Z-E split, the degenerate
//! metric `g`, the nondegenerate `h`, equivalence modulo E and the
//! homogeneous tangent lift.

use std::fmt;

use nalgebra::{Matrix4, Matrix5, Vector5};
use thiserror::Error;

use crate::expr::{EvalError, Expression};
use crate::linalg::RealMatrix;
use crate::{Point, FIFTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Fifth basis vector lies in E.
    Standard,
    /// Standard, first four vectors in Z.
    Regular,
    /// Regular with `|h(e4, e4)| = 1`.
    NormalizedRegular,
    General,
}

/// Sign of `h` on the E subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Xi {
    Plus,
    Minus,
}

impl Xi {
    pub fn sign(self) -> f64 {
        match self {
            Xi::Plus => 1.0,
            Xi::Minus => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Option<Xi> {
        if s == 1.0 {
            Some(Xi::Plus)
        } else if s == -1.0 {
            Some(Xi::Minus)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisDescriptor {
    pub kind: BasisKind,
    pub xi: Xi,
}

impl BasisDescriptor {
    pub fn new(kind: BasisKind, xi: Xi) -> Self {
        Self { kind, xi }
    }

    pub fn normalized_regular(xi: Xi) -> Self {
        Self::new(BasisKind::NormalizedRegular, xi)
    }

    pub fn is_standard(&self) -> bool {
        self.kind != BasisKind::General
    }

    pub fn is_regular(&self) -> bool {
        matches!(self.kind, BasisKind::Regular | BasisKind::NormalizedRegular)
    }
}

impl Default for BasisDescriptor {
    fn default() -> Self {
        Self::normalized_regular(Xi::Plus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalClass {
    FutureTimelikeOrNull,
    PastTimelikeOrNull,
    Spacelike,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CausalClass::FutureTimelikeOrNull => "future timelike or null",
            CausalClass::PastTimelikeOrNull => "past timelike or null",
            CausalClass::Spacelike => "spacelike",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftConvention {
    /// `+‖u‖`, `-‖u‖`, `0` on future, past and spacelike vectors.
    Reversible,
    /// `+‖u‖` always, with `‖u‖ = √|g(u,u)|`.
    Irreversible,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PentavecError {
    #[error("operation requires a standard basis")]
    NonStandardBasis,
    #[error("operands are expressed in different bases")]
    BasisMismatch,
    #[error("vector has E-component {0}, expected a Z-vector")]
    NotInZ(f64),
    #[error("vector with g(u,u) = {g_uu} and u^0 = {u0} is not {class}")]
    CausalClassMismatch {
        class: CausalClass,
        g_uu: f64,
        u0: f64,
    },
    #[error("basis change matrix is singular")]
    SingularTransform,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Components `u^A` in the basis `basis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveVector {
    pub c: Vector5<f64>,
    pub basis: BasisDescriptor,
}

impl FiveVector {
    pub fn new(c: [f64; 5], basis: BasisDescriptor) -> Self {
        Self {
            c: Vector5::from(c),
            basis,
        }
    }

    /// Z-vector with space-time components `u`.
    pub fn from_z(u: [f64; 4], basis: BasisDescriptor) -> Self {
        Self::new([u[0], u[1], u[2], u[3], 0.0], basis)
    }

    pub fn basis_vector(a: usize, basis: BasisDescriptor) -> Self {
        let mut c = [0.0; 5];
        c[a] = 1.0;
        Self::new(c, basis)
    }

    /// The E-coordinate `λ_u`.
    pub fn lambda(&self) -> f64 {
        self.c[FIFTH]
    }

    pub fn spacetime(&self) -> [f64; 4] {
        [self.c[0], self.c[1], self.c[2], self.c[3]]
    }

    pub fn split(&self) -> Result<(FiveVector, FiveVector), PentavecError> {
        if !self.basis.is_standard() {
            return Err(PentavecError::NonStandardBasis);
        }
        let mut z = *self;
        let mut e = *self;
        z.c[FIFTH] = 0.0;
        for a in 0..FIFTH {
            e.c[a] = 0.0;
        }
        Ok((z, e))
    }

    pub fn z_part(&self) -> Result<FiveVector, PentavecError> {
        Ok(self.split()?.0)
    }

    pub fn e_part(&self) -> Result<FiveVector, PentavecError> {
        Ok(self.split()?.1)
    }

    /// `u ≡ v (mod R)`: the difference lies in E.
    pub fn equivalent_mod_r(&self, other: &FiveVector) -> Result<bool, PentavecError> {
        if self.basis != other.basis {
            return Err(PentavecError::BasisMismatch);
        }
        if !self.basis.is_standard() {
            return Err(PentavecError::NonStandardBasis);
        }
        Ok((0..FIFTH).all(|a| self.c[a] == other.c[a]))
    }

    /// Components in the basis `e'_A = e_B L^B_A`: `u'^A = (L⁻¹)^A_B u^B`.
    pub fn transform(
        &self,
        l: &Matrix5<f64>,
        target: BasisDescriptor,
    ) -> Result<FiveVector, PentavecError> {
        let l_inv = l.try_inverse().ok_or(PentavecError::SingularTransform)?;
        Ok(FiveVector {
            c: l_inv * self.c,
            basis: target,
        })
    }

    pub fn scale(&self, k: f64) -> FiveVector {
        FiveVector {
            c: self.c * k,
            basis: self.basis,
        }
    }
}

impl std::ops::Add for FiveVector {
    type Output = FiveVector;
    fn add(self, rhs: FiveVector) -> FiveVector {
        debug_assert_eq!(self.basis, rhs.basis);
        FiveVector {
            c: self.c + rhs.c,
            basis: self.basis,
        }
    }
}

/// Components `s_A` of a linear form on five-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveForm {
    pub c: Vector5<f64>,
    pub basis: BasisDescriptor,
}

impl FiveForm {
    pub fn new(c: [f64; 5], basis: BasisDescriptor) -> Self {
        Self {
            c: Vector5::from(c),
            basis,
        }
    }

    /// Components in the basis `e'_A = e_B L^B_A`: `s'_A = s_B L^B_A`.
    pub fn transform(&self, l: &Matrix5<f64>, target: BasisDescriptor) -> FiveForm {
        FiveForm {
            c: l.transpose() * self.c,
            basis: target,
        }
    }

    pub fn contract(&self, u: &FiveVector) -> Result<f64, PentavecError> {
        if self.basis != u.basis {
            return Err(PentavecError::BasisMismatch);
        }
        Ok(self.c.dot(&u.c))
    }
}

/// Degenerate metric `g` at a point; `g_{A4} = 0` in a standard basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricG {
    pub g: Matrix5<f64>,
}

impl MetricG {
    pub fn minkowski() -> Self {
        Self::from_block(&Matrix4::from_diagonal(&nalgebra::Vector4::new(
            1.0, -1.0, -1.0, -1.0,
        )))
    }

    pub fn from_block(block: &Matrix4<f64>) -> Self {
        let mut g = Matrix5::zeros();
        g.fixed_view_mut::<4, 4>(0, 0).copy_from(block);
        Self { g }
    }

    pub fn inner(&self, u: &FiveVector, v: &FiveVector) -> Result<f64, PentavecError> {
        if u.basis != v.basis {
            return Err(PentavecError::BasisMismatch);
        }
        Ok((u.c.transpose() * self.g * v.c)[(0, 0)])
    }

    /// `‖u‖ = √|g(u,u)|`.
    pub fn norm(&self, u: &FiveVector) -> f64 {
        (u.c.transpose() * self.g * u.c)[(0, 0)].abs().sqrt()
    }

    /// Norm of a space-time vector.
    pub fn norm4(&self, u: &[f64; 4]) -> f64 {
        let v = FiveVector::from_z(*u, BasisDescriptor::default());
        self.norm(&v)
    }

    pub fn quad4(&self, u: &[f64; 4]) -> f64 {
        let v = FiveVector::from_z(*u, BasisDescriptor::default());
        (v.c.transpose() * self.g * v.c)[(0, 0)]
    }
}

/// Nondegenerate `h` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricH {
    pub h: Matrix5<f64>,
}

impl MetricH {
    /// `h` in a normalized regular basis: `g` on the Z block and `ξ` on E.
    pub fn normalized_regular(g: &MetricG, xi: Xi) -> Self {
        let mut h = g.g;
        h[(FIFTH, FIFTH)] = xi.sign();
        Self { h }
    }

    /// Components in the basis `e'_A = e_B L^B_A`: `h' = Lᵀ h L`.
    pub fn transform(&self, l: &Matrix5<f64>) -> Self {
        Self {
            h: l.transpose() * self.h * l,
        }
    }

    pub fn inner(&self, u: &FiveVector, v: &FiveVector) -> Result<f64, PentavecError> {
        if u.basis != v.basis {
            return Err(PentavecError::BasisMismatch);
        }
        Ok((u.c.transpose() * self.h * v.c)[(0, 0)])
    }
}

/// Symbolic metric field `g_AB(x)` on five-vectors.
#[derive(Debug, Clone)]
pub struct MetricField {
    pub g: RealMatrix,
}

impl MetricField {
    pub fn minkowski() -> Self {
        let diag = [1.0, -1.0, -1.0, -1.0, 0.0];
        Self {
            g: RealMatrix::from_fn(5, 5, |a, b| {
                if a == b {
                    Expression::constant(diag[a])
                } else {
                    Expression::zero()
                }
            }),
        }
    }

    /// Embeds a space-time metric with zero fifth row and column.
    pub fn from_spacetime(g4: &RealMatrix) -> Self {
        assert_eq!((g4.rows(), g4.cols()), (4, 4));
        Self {
            g: RealMatrix::from_fn(5, 5, |a, b| {
                if a < 4 && b < 4 {
                    g4.get(a, b).clone()
                } else {
                    Expression::zero()
                }
            }),
        }
    }

    pub fn spacetime_block(&self) -> RealMatrix {
        RealMatrix::from_fn(4, 4, |a, b| self.g.get(a, b).clone())
    }

    pub fn eval(&self, p: &Point) -> Result<MetricG, EvalError> {
        let m = self.g.eval(p)?;
        Ok(MetricG {
            g: Matrix5::from_fn(|a, b| m[(a, b)]),
        })
    }
}

const CAUSAL_TOL: f64 = 1e-12;

/// Causal class of a Z-vector. Null vectors count as timelike-or-null;
/// the time orientation is the sign of `u^0`.
pub fn causal_class(u: &FiveVector, g: &MetricG) -> CausalClass {
    let q = (u.c.transpose() * g.g * u.c)[(0, 0)];
    if q < -CAUSAL_TOL * u.c.norm_squared() {
        CausalClass::Spacelike
    } else if u.c[0] < 0.0 {
        CausalClass::PastTimelikeOrNull
    } else {
        CausalClass::FutureTimelikeOrNull
    }
}

/// Homogeneous tangent five-vector `ŭ = u ± ‖u‖ e4` in a normalized
/// regular basis.
pub fn homogeneous_lift(
    u: &FiveVector,
    class: CausalClass,
    convention: LiftConvention,
    g: &MetricG,
) -> Result<FiveVector, PentavecError> {
    if u.lambda() != 0.0 {
        return Err(PentavecError::NotInZ(u.lambda()));
    }
    if !u.basis.is_standard() {
        return Err(PentavecError::NonStandardBasis);
    }
    let actual = causal_class(u, g);
    if actual != class {
        return Err(PentavecError::CausalClassMismatch {
            class,
            g_uu: (u.c.transpose() * g.g * u.c)[(0, 0)],
            u0: u.c[0],
        });
    }
    let norm = g.norm(u);
    let e = match (convention, class) {
        (LiftConvention::Irreversible, _) => norm,
        (LiftConvention::Reversible, CausalClass::FutureTimelikeOrNull) => norm,
        (LiftConvention::Reversible, CausalClass::PastTimelikeOrNull) => -norm,
        (LiftConvention::Reversible, CausalClass::Spacelike) => 0.0,
    };
    let mut lift = *u;
    lift.c[FIFTH] = e;
    Ok(lift)
}

/// `|h(ŭ,ŭ) - (1 + ξ) g(ŭ,ŭ)|`.
pub fn h_relation_residual(lift: &FiveVector, g: &MetricG, h: &MetricH, xi: Xi) -> f64 {
    let hh = (lift.c.transpose() * h.h * lift.c)[(0, 0)];
    let gg = (lift.c.transpose() * g.g * lift.c)[(0, 0)];
    (hh - (1.0 + xi.sign()) * gg).abs()
}
