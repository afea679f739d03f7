//! Scalar fields over the four space-time coordinates.
//!
//! An [`Expression`] is an immutable, reference-counted syntax tree over the
//! coordinates `x0..x3`. Every other module builds its component fields out of
//! these trees, so the derivatives used throughout the crate are exact
//! symbolic derivatives rather than finite differences.
//!
//! The fifth basis direction never carries a coordinate: [`Expression::partial`]
//! with direction [`FIFTH`](crate::FIFTH) returns zero for every field.
//!
//! Smart constructors fold constants and apply the `0` / `1` identities and
//! nothing more; equality of two expressions is judged by evaluation.

mod complex;
mod parse;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

pub use complex::ComplexExpression;
pub use parse::{parse, ParseError, ParseErrorKind};

use crate::Point;

/// Elementary functions accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub(crate) enum Node {
    Const(f64),
    Var(usize),
    Add(Expression, Expression),
    Sub(Expression, Expression),
    Mul(Expression, Expression),
    Div(Expression, Expression),
    Neg(Expression),
    Pow(Expression, i32),
    Call(Func, Expression),
}

/// Symbolic scalar field `f(x0, x1, x2, x3)`.
#[derive(Clone)]
pub struct Expression(Arc<Node>);

/// Why an expression could not be evaluated at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainErrorKind {
    DivisionByZero,
    NegativeSqrt,
    NonFinite,
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainErrorKind::DivisionByZero => write!(f, "division by zero"),
            DomainErrorKind::NegativeSqrt => write!(f, "square root of a negative number"),
            DomainErrorKind::NonFinite => write!(f, "non-finite value"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} in `{subterm}`")]
pub struct EvalError {
    pub kind: DomainErrorKind,
    /// Printed form of the offending subterm.
    pub subterm: String,
}

impl Expression {
    fn from_node(node: Node) -> Self {
        Expression(Arc::new(node))
    }

    pub(crate) fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(value: f64) -> Self {
        Self::from_node(Node::Const(value))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// Coordinate `x_mu`; `mu` must be in `0..4`.
    pub fn coord(mu: usize) -> Self {
        assert!(mu < 4, "coordinate index {mu} out of range 0..4");
        Self::from_node(Node::Var(mu))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True when the tree is the literal constant zero.
    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(1.0)
    }

    pub fn powi(&self, exponent: i32) -> Self {
        match (self.node(), exponent) {
            (_, 0) => Self::one(),
            (_, 1) => self.clone(),
            (Node::Const(c), k) if *c != 0.0 || k > 0 => Self::constant(c.powi(k)),
            (Node::Pow(base, k0), k) => match k0.checked_mul(k) {
                Some(total) => base.powi(total),
                None => Self::from_node(Node::Pow(self.clone(), k)),
            },
            _ => Self::from_node(Node::Pow(self.clone(), exponent)),
        }
    }

    pub fn call(func: Func, arg: Expression) -> Self {
        if let Some(c) = arg.as_constant() {
            let folded = match func {
                Func::Sin => Some(c.sin()),
                Func::Cos => Some(c.cos()),
                Func::Exp => Some(c.exp()),
                Func::Sqrt if c >= 0.0 => Some(c.sqrt()),
                Func::Sqrt => None,
            };
            if let Some(v) = folded.filter(|v| v.is_finite()) {
                return Self::constant(v);
            }
        }
        Self::from_node(Node::Call(func, arg))
    }

    pub fn sin(&self) -> Self {
        Self::call(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Self {
        Self::call(Func::Cos, self.clone())
    }

    pub fn exp(&self) -> Self {
        Self::call(Func::Exp, self.clone())
    }

    pub fn sqrt(&self) -> Self {
        Self::call(Func::Sqrt, self.clone())
    }

    /// Exact partial derivative along coordinate direction `mu`.
    ///
    /// Directions `mu >= 4` (the fifth basis direction) give zero.
    pub fn partial(&self, mu: usize) -> Expression {
        if mu >= 4 {
            return Self::zero();
        }
        match self.node() {
            Node::Const(_) => Self::zero(),
            Node::Var(v) => Self::constant(if *v == mu { 1.0 } else { 0.0 }),
            Node::Add(a, b) => a.partial(mu) + b.partial(mu),
            Node::Sub(a, b) => a.partial(mu) - b.partial(mu),
            Node::Mul(a, b) => a.partial(mu) * b + a * b.partial(mu),
            Node::Div(a, b) => {
                let da = a.partial(mu);
                let db = b.partial(mu);
                if db.is_zero() {
                    da / b
                } else {
                    (da * b - a * db) / b.powi(2)
                }
            }
            Node::Neg(a) => -a.partial(mu),
            Node::Pow(base, k) => {
                let db = base.partial(mu);
                if db.is_zero() {
                    return Self::zero();
                }
                Self::constant(f64::from(*k)) * base.powi(k - 1) * db
            }
            Node::Call(func, arg) => {
                let da = arg.partial(mu);
                if da.is_zero() {
                    return Self::zero();
                }
                let outer = match func {
                    Func::Sin => arg.cos(),
                    Func::Cos => -arg.sin(),
                    Func::Exp => self.clone(),
                    Func::Sqrt => Self::constant(0.5) / self,
                };
                outer * da
            }
        }
    }

    /// Evaluates at `p`, failing on division by zero, square roots of
    /// negative numbers and overflow.
    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        let value = match self.node() {
            Node::Const(c) => *c,
            Node::Var(v) => p[*v],
            Node::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Node::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Node::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Node::Div(a, b) => {
                let den = b.eval(p)?;
                if den == 0.0 {
                    return Err(self.domain_error(DomainErrorKind::DivisionByZero));
                }
                a.eval(p)? / den
            }
            Node::Neg(a) => -a.eval(p)?,
            Node::Pow(base, k) => {
                let b = base.eval(p)?;
                if b == 0.0 && *k < 0 {
                    return Err(self.domain_error(DomainErrorKind::DivisionByZero));
                }
                b.powi(*k)
            }
            Node::Call(func, arg) => {
                let x = arg.eval(p)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(self.domain_error(DomainErrorKind::NegativeSqrt));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(self.domain_error(DomainErrorKind::NonFinite))
        }
    }

    fn domain_error(&self, kind: DomainErrorKind) -> EvalError {
        EvalError {
            kind,
            subterm: self.to_string(),
        }
    }

    /// Number of nodes in the tree, counting shared subtrees once per use.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => 1 + a.size(),
        }
    }

    /// Replaces the coordinates by other expressions, e.g. to restrict a
    /// field to a curve.
    pub fn substitute(&self, coords: &[Expression; 4]) -> Expression {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(v) => coords[*v].clone(),
            Node::Add(a, b) => a.substitute(coords) + b.substitute(coords),
            Node::Sub(a, b) => a.substitute(coords) - b.substitute(coords),
            Node::Mul(a, b) => a.substitute(coords) * b.substitute(coords),
            Node::Div(a, b) => a.substitute(coords) / b.substitute(coords),
            Node::Neg(a) => -a.substitute(coords),
            Node::Pow(a, k) => a.substitute(coords).powi(*k),
            Node::Call(f, a) => Expression::call(*f, a.substitute(coords)),
        }
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
            Node::Pow(..) => 4,
            Node::Const(_) | Node::Var(_) | Node::Call(..) => 5,
        }
    }
}

impl Default for Expression {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<f64> for Expression {
    fn from(value: f64) -> Self {
        Self::constant(value)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expression, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(v) => write!(f, "x{v}"),
            Node::Add(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " + ")?;
                write_operand(f, b, 2)
            }
            Node::Sub(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " - ")?;
                write_operand(f, b, 2)
            }
            Node::Mul(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "*")?;
                write_operand(f, b, 3)
            }
            Node::Div(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "/")?;
                write_operand(f, b, 3)
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                write_operand(f, a, 4)
            }
            Node::Pow(a, k) => {
                write_operand(f, a, 5)?;
                write!(f, "^{k}")
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expression({self})")
    }
}

fn add(a: &Expression, b: &Expression) -> Expression {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => Expression::constant(x + y),
        (Some(x), _) if x == 0.0 => b.clone(),
        (_, Some(y)) if y == 0.0 => a.clone(),
        _ => Expression::from_node(Node::Add(a.clone(), b.clone())),
    }
}

fn sub(a: &Expression, b: &Expression) -> Expression {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => Expression::constant(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a.clone(),
        _ => Expression::from_node(Node::Sub(a.clone(), b.clone())),
    }
}

fn mul(a: &Expression, b: &Expression) -> Expression {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => Expression::constant(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expression::zero(),
        (Some(x), _) if x == 1.0 => b.clone(),
        (_, Some(y)) if y == 1.0 => a.clone(),
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => Expression::from_node(Node::Mul(a.clone(), b.clone())),
    }
}

fn div(a: &Expression, b: &Expression) -> Expression {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) if y != 0.0 => Expression::constant(x / y),
        (Some(x), _) if x == 0.0 => Expression::zero(),
        (_, Some(y)) if y == 1.0 => a.clone(),
        _ => Expression::from_node(Node::Div(a.clone(), b.clone())),
    }
}

fn neg(a: &Expression) -> Expression {
    match a.node() {
        Node::Const(c) => Expression::constant(-c),
        Node::Neg(inner) => inner.clone(),
        _ => Expression::from_node(Node::Neg(a.clone())),
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $func:ident) => {
        impl $trait<Expression> for Expression {
            type Output = Expression;
            fn $method(self, rhs: Expression) -> Expression {
                $func(&self, &rhs)
            }
        }
        impl $trait<&Expression> for Expression {
            type Output = Expression;
            fn $method(self, rhs: &Expression) -> Expression {
                $func(&self, rhs)
            }
        }
        impl $trait<Expression> for &Expression {
            type Output = Expression;
            fn $method(self, rhs: Expression) -> Expression {
                $func(self, &rhs)
            }
        }
        impl $trait<&Expression> for &Expression {
            type Output = Expression;
            fn $method(self, rhs: &Expression) -> Expression {
                $func(self, rhs)
            }
        }
        impl $trait<f64> for Expression {
            type Output = Expression;
            fn $method(self, rhs: f64) -> Expression {
                $func(&self, &Expression::constant(rhs))
            }
        }
        impl $trait<f64> for &Expression {
            type Output = Expression;
            fn $method(self, rhs: f64) -> Expression {
                $func(self, &Expression::constant(rhs))
            }
        }
    };
}

impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);
impl_binop!(Div, div, div);

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        neg(&self)
    }
}

impl Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        neg(self)
    }
}

impl std::iter::Sum for Expression {
    fn sum<I: Iterator<Item = Expression>>(iter: I) -> Expression {
        iter.fold(Expression::zero(), |acc, e| acc + e)
    }
}

/// Largest `|e(p)|` over all expressions and points.
pub fn max_abs_over<'a>(
    exprs: impl IntoIterator<Item = &'a Expression>,
    points: &[Point],
) -> Result<f64, EvalError> {
    let mut worst = 0.0_f64;
    for e in exprs {
        if e.is_zero() {
            continue;
        }
        for p in points {
            worst = worst.max(e.eval(p)?.abs());
        }
    }
    Ok(worst)
}

/// Largest `|z(p)|` over all complex expressions and points.
pub fn max_norm_over<'a>(
    exprs: impl IntoIterator<Item = &'a ComplexExpression>,
    points: &[Point],
) -> Result<f64, EvalError> {
    let mut worst = 0.0_f64;
    for e in exprs {
        if e.is_zero() {
            continue;
        }
        for p in points {
            worst = worst.max(e.eval(p)?.norm());
        }
    }
    Ok(worst)
}
