use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{EvalError, Expression};
use crate::Point;

/// Complex scalar field held as a pair of real expressions.
#[derive(Clone, Debug, Default)]
pub struct ComplexExpression {
    pub re: Expression,
    pub im: Expression,
}

impl ComplexExpression {
    pub fn new(re: Expression, im: Expression) -> Self {
        Self { re, im }
    }

    pub fn real(re: Expression) -> Self {
        Self {
            re,
            im: Expression::zero(),
        }
    }

    pub fn imag(im: Expression) -> Self {
        Self {
            re: Expression::zero(),
            im,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(Expression::constant(c.re), Expression::constant(c.im))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Expression::one())
    }

    /// The imaginary unit times `e`.
    pub fn i_times(e: &Expression) -> Self {
        Self::imag(e.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn partial(&self, mu: usize) -> Self {
        Self::new(self.re.partial(mu), self.im.partial(mu))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self * &Self::constant(c)
    }

    pub fn eval(&self, p: &Point) -> Result<Complex64, EvalError> {
        Ok(Complex64::new(self.re.eval(p)?, self.im.eval(p)?))
    }
}

impl From<Expression> for ComplexExpression {
    fn from(re: Expression) -> Self {
        Self::real(re)
    }
}

impl fmt::Display for ComplexExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i*({})", self.im),
            (false, false) => write!(f, "({}) + i*({})", self.re, self.im),
        }
    }
}

fn cadd(a: &ComplexExpression, b: &ComplexExpression) -> ComplexExpression {
    ComplexExpression::new(&a.re + &b.re, &a.im + &b.im)
}

fn csub(a: &ComplexExpression, b: &ComplexExpression) -> ComplexExpression {
    ComplexExpression::new(&a.re - &b.re, &a.im - &b.im)
}

fn cmul(a: &ComplexExpression, b: &ComplexExpression) -> ComplexExpression {
    ComplexExpression::new(
        &a.re * &b.re - &a.im * &b.im,
        &a.re * &b.im + &a.im * &b.re,
    )
}

fn cdiv(a: &ComplexExpression, b: &ComplexExpression) -> ComplexExpression {
    if b.im.is_zero() {
        return ComplexExpression::new(&a.re / &b.re, &a.im / &b.re);
    }
    let den = &b.re * &b.re + &b.im * &b.im;
    ComplexExpression::new(
        (&a.re * &b.re + &a.im * &b.im) / &den,
        (&a.im * &b.re - &a.re * &b.im) / &den,
    )
}

macro_rules! impl_cbinop {
    ($trait:ident, $method:ident, $func:ident) => {
        impl $trait<ComplexExpression> for ComplexExpression {
            type Output = ComplexExpression;
            fn $method(self, rhs: ComplexExpression) -> ComplexExpression {
                $func(&self, &rhs)
            }
        }
        impl $trait<&ComplexExpression> for ComplexExpression {
            type Output = ComplexExpression;
            fn $method(self, rhs: &ComplexExpression) -> ComplexExpression {
                $func(&self, rhs)
            }
        }
        impl $trait<ComplexExpression> for &ComplexExpression {
            type Output = ComplexExpression;
            fn $method(self, rhs: ComplexExpression) -> ComplexExpression {
                $func(self, &rhs)
            }
        }
        impl $trait<&ComplexExpression> for &ComplexExpression {
            type Output = ComplexExpression;
            fn $method(self, rhs: &ComplexExpression) -> ComplexExpression {
                $func(self, rhs)
            }
        }
    };
}

impl_cbinop!(Add, add, cadd);
impl_cbinop!(Sub, sub, csub);
impl_cbinop!(Mul, mul, cmul);
impl_cbinop!(Div, div, cdiv);

impl Neg for ComplexExpression {
    type Output = ComplexExpression;
    fn neg(self) -> ComplexExpression {
        ComplexExpression::new(-self.re, -self.im)
    }
}

impl Neg for &ComplexExpression {
    type Output = ComplexExpression;
    fn neg(self) -> ComplexExpression {
        ComplexExpression::new(-&self.re, -&self.im)
    }
}

impl std::iter::Sum for ComplexExpression {
    fn sum<I: Iterator<Item = ComplexExpression>>(iter: I) -> ComplexExpression {
        iter.fold(ComplexExpression::zero(), |acc, e| acc + e)
    }
}
