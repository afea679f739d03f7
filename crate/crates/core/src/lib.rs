//! Five-vector affine connection calculus.
//!
//! Component index conventions used throughout:
//!
//! * Five-vector indices run over `0..5`. Indices `0..4` are the space-time
//!   directions and index [`FIFTH`] (`4`) is the E direction of a standard
//!   basis.
//! * Connection coefficients `H^C_{BA}` put the differentiation direction
//!   last: `∇̄_A e_B = e_C H^C_{BA}`.
//! * The partial derivative of any component field along [`FIFTH`] is zero.
//! * The space-time signature is `(+, -, -, -)`.

pub mod connection;
pub mod expr;
pub mod forms;
pub mod gauge;
pub mod linalg;
pub mod npo;
pub mod pentavec;
pub mod sampling;

/// A point of the single global chart.
pub type Point = [f64; 4];

/// Index of the fifth (E) basis direction.
pub const FIFTH: usize = 4;

/// Number of five-vector components.
pub const DIM5: usize = 5;

pub use expr::{parse, ComplexExpression, EvalError, Expression};
