//! Small dense matrices of symbolic scalars.
//!
//! Basis changes are supplied as expression matrices; the inverse is built
//! symbolically from the adjugate so that derivatives of `L⁻¹` stay exact.
//! Laplace expansion skips literal zeros, which keeps triangular and block
//! matrices cheap.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::expr::{ComplexExpression, EvalError, Expression};
use crate::Point;

/// Scalar field type usable as a matrix entry.
pub trait Scalar:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Value: nalgebra::ComplexField + Copy;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn partial(&self, mu: usize) -> Self;
    fn eval(&self, p: &Point) -> Result<Self::Value, EvalError>;
}

impl Scalar for Expression {
    type Value = f64;

    fn zero() -> Self {
        Expression::zero()
    }
    fn one() -> Self {
        Expression::one()
    }
    fn is_zero(&self) -> bool {
        Expression::is_zero(self)
    }
    fn partial(&self, mu: usize) -> Self {
        Expression::partial(self, mu)
    }
    fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        Expression::eval(self, p)
    }
}

impl Scalar for ComplexExpression {
    type Value = Complex64;

    fn zero() -> Self {
        ComplexExpression::zero()
    }
    fn one() -> Self {
        ComplexExpression::one()
    }
    fn is_zero(&self) -> bool {
        ComplexExpression::is_zero(self)
    }
    fn partial(&self, mu: usize) -> Self {
        ComplexExpression::partial(self, mu)
    }
    fn eval(&self, p: &Point) -> Result<Complex64, EvalError> {
        ComplexExpression::eval(self, p)
    }
}

#[derive(Debug, Clone)]
pub struct SymMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealMatrix = SymMatrix<Expression>;
pub type ComplexMatrix = SymMatrix<ComplexExpression>;

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn partial(&self, mu: usize) -> Self {
        self.map(|e| e.partial(mu))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a.clone() * b.clone();
                }
            }
            acc
        })
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !vj.is_zero() {
                        acc = acc + a.clone() * vj.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() + other.get(i, j).clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() - other.get(i, j).clone()
        })
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e.clone())
    }

    /// Determinant by Laplace expansion with zero skipping.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.rows).collect();
        self.minor_det(&idx, &idx)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> T {
        match rows.len() {
            0 => return T::one(),
            1 => return self.get(rows[0], cols[0]).clone(),
            _ => {}
        }
        // expand along the row with the most literal zeros
        let (pivot_pos, _) = rows
            .iter()
            .enumerate()
            .map(|(pos, &r)| {
                let zeros = cols.iter().filter(|&&c| self.get(r, c).is_zero()).count();
                (pos, zeros)
            })
            .max_by_key(|&(pos, zeros)| (zeros, std::cmp::Reverse(pos)))
            .expect("non-empty");
        let r = rows[pivot_pos];
        let sub_rows: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
        let mut acc = T::zero();
        for (k, &c) in cols.iter().enumerate() {
            let entry = self.get(r, c);
            if entry.is_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = entry.clone() * self.minor_det(&sub_rows, &sub_cols);
            if (pivot_pos + k) % 2 == 0 {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
        }
        acc
    }

    /// Symbolic inverse `adj(M) / det(M)`. Singularity is only detectable
    /// at evaluation time (division by zero).
    pub fn inverse(&self) -> Self {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let det = self.det();
        let all: Vec<usize> = (0..n).collect();
        Self::from_fn(n, n, |i, j| {
            // (M⁻¹)_{ij} = (-1)^{i+j} minor_{ji} / det
            let rows: Vec<usize> = all.iter().copied().filter(|&x| x != j).collect();
            let cols: Vec<usize> = all.iter().copied().filter(|&x| x != i).collect();
            let cof = self.minor_det(&rows, &cols);
            if cof.is_zero() {
                return T::zero();
            }
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            cof / det.clone()
        })
    }

    pub fn eval(&self, p: &Point) -> Result<DMatrix<T::Value>, EvalError> {
        let mut values = Vec::with_capacity(self.data.len());
        for e in &self.data {
            values.push(e.eval(p)?);
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &values))
    }
}

impl RealMatrix {
    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            ComplexExpression::real(self.get(i, j).clone())
        })
    }

    pub fn constant(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| Expression::constant(values[i * cols + j]))
    }
}

impl ComplexMatrix {
    pub fn conj(&self) -> Self {
        self.map(ComplexExpression::conj)
    }

    pub fn constant(rows: usize, cols: usize, values: &[Complex64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| {
            ComplexExpression::constant(values[i * cols + j])
        })
    }
}

/// A basis change `L` together with its inverse. Keeping both lets round
/// trips swap the pair instead of inverting twice.
#[derive(Debug, Clone)]
pub struct BasisChange<T> {
    pub l: SymMatrix<T>,
    pub l_inv: SymMatrix<T>,
}

impl<T: Scalar> BasisChange<T> {
    /// Builds the inverse symbolically.
    pub fn new(l: SymMatrix<T>) -> Self {
        let l_inv = l.inverse();
        Self { l, l_inv }
    }

    /// Caller guarantees `l * l_inv = 1`.
    pub fn with_inverse(l: SymMatrix<T>, l_inv: SymMatrix<T>) -> Self {
        assert_eq!(l.rows(), l_inv.rows());
        Self { l, l_inv }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            l: SymMatrix::identity(n),
            l_inv: SymMatrix::identity(n),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            l: self.l_inv.clone(),
            l_inv: self.l.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Largest entry of `L L⁻¹ - 1` at `p`.
    pub fn inverse_defect(&self, p: &Point) -> Result<f64, EvalError>
    where
        <T::Value as nalgebra::ComplexField>::RealField: Into<f64>,
    {
        let prod = self.l.matmul(&self.l_inv).eval(p)?;
        let id = DMatrix::<T::Value>::identity(self.dim(), self.dim());
        Ok(max_abs_diff(&prod, &id))
    }
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff<V: nalgebra::ComplexField + Copy>(a: &DMatrix<V>, b: &DMatrix<V>) -> f64
where
    V::RealField: Into<f64>,
{
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (*x - *y).modulus().into())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> Expression {
        parse(s).unwrap()
    }

    #[test]
    fn inverse_of_polynomial_matrix() {
        let m = RealMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => e("2 + x0"),
            (0, 1) => e("x1"),
            (1, 1) => e("1 + x2^2"),
            (1, 2) => e("sin(x3)"),
            (2, 0) => e("x0*x1"),
            (2, 2) => e("3"),
            _ => Expression::zero(),
        });
        let inv = m.inverse();
        let p = [0.3, -0.4, 0.8, 1.2];
        let prod = m.matmul(&inv).eval(&p).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        assert!(max_abs_diff(&prod, &id) < 1e-14);
    }

    #[test]
    fn triangular_inverse_stays_polynomial() {
        let m = RealMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                Expression::one()
            } else if j < i {
                e("x0 + x1")
            } else {
                Expression::zero()
            }
        });
        let inv = m.inverse();
        // no division survives because the determinant folds to 1
        assert!(inv.get(4, 0).size() < 200);
        let p = [0.1, 0.2, 0.3, 0.4];
        let prod = inv.matmul(&m).eval(&p).unwrap();
        assert!(max_abs_diff(&prod, &DMatrix::identity(5, 5)) < 1e-14);
    }

    #[test]
    fn complex_determinant() {
        let i = Complex64::new(0.0, 1.0);
        let m = ComplexMatrix::constant(2, 2, &[i, 2.0 * i, Complex64::new(1.0, 0.0), i]);
        let det = m.det().eval(&[0.0; 4]).unwrap();
        assert!((det - (i * i - 2.0 * i)).norm() < 1e-15);
    }
}
