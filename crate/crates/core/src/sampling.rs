//! Deterministic sample points and random test fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{ComplexExpression, Expression};
use crate::linalg::{BasisChange, ComplexMatrix, RealMatrix};
use crate::{Point, DIM5};

/// Coordinate box of the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartBox {
    pub min: Point,
    pub max: Point,
}

impl ChartBox {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn unit() -> Self {
        Self {
            min: [-1.0; 4],
            max: [1.0; 4],
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..4).all(|mu| self.min[mu] <= p[mu] && p[mu] <= self.max[mu])
    }
}

impl Default for ChartBox {
    fn default() -> Self {
        Self::unit()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("only {found} of {wanted} sample points avoided the field singularities after {tried} draws")]
pub struct SamplingError {
    pub wanted: usize,
    pub found: usize,
    pub tried: usize,
}

const HALTON_BASES: [u64; 4] = [2, 3, 5, 7];

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv_base = 1.0 / base as f64;
    let mut value = 0.0;
    while k > 0 {
        value += (k % base) as f64 * inv_base;
        k /= base;
        inv_base /= base as f64;
    }
    value
}

/// Shifted Halton sequence in the chart box. The Cranley-Patterson shift is
/// drawn from `seed`, so distinct seeds give distinct but reproducible sets.
#[derive(Debug, Clone)]
pub struct PointSampler {
    chart: ChartBox,
    shift: [f64; 4],
    next: u64,
}

impl PointSampler {
    pub fn new(chart: ChartBox, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = [rng.random(), rng.random(), rng.random(), rng.random()];
        Self {
            chart,
            shift,
            next: 1,
        }
    }

    pub fn next_point(&mut self) -> Point {
        let k = self.next;
        self.next += 1;
        let mut p = [0.0; 4];
        for mu in 0..4 {
            let u = (radical_inverse(k, HALTON_BASES[mu]) + self.shift[mu]).fract();
            p[mu] = self.chart.min[mu] + u * (self.chart.max[mu] - self.chart.min[mu]);
        }
        p
    }

    /// Draws `count` points accepted by `admissible`, giving up after
    /// `10 * count` draws.
    pub fn sample(
        &mut self,
        count: usize,
        mut admissible: impl FnMut(&Point) -> bool,
    ) -> Result<Vec<Point>, SamplingError> {
        let cap = count.saturating_mul(10).max(10);
        let mut points = Vec::with_capacity(count);
        let mut tried = 0;
        while points.len() < count && tried < cap {
            let p = self.next_point();
            tried += 1;
            if admissible(&p) {
                points.push(p);
            }
        }
        if points.len() < count {
            return Err(SamplingError {
                wanted: count,
                found: points.len(),
                tried,
            });
        }
        Ok(points)
    }
}

/// Convenience: `count` admissible points for `seed`.
pub fn sample_points(
    chart: ChartBox,
    seed: u64,
    count: usize,
    admissible: impl FnMut(&Point) -> bool,
) -> Result<Vec<Point>, SamplingError> {
    PointSampler::new(chart, seed).sample(count, admissible)
}

/// Seeded generator for random test fields.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial in `x0..x3` with `terms` monomials of total degree at
/// most `max_degree` and coefficients in `[-1, 1]`.
pub fn random_polynomial(rng: &mut impl Rng, max_degree: u32, terms: usize) -> Expression {
    let mut acc = Expression::zero();
    for _ in 0..terms {
        let coef: f64 = rng.random_range(-1.0..=1.0);
        let degree = rng.random_range(0..=max_degree);
        let mut monomial = Expression::constant(coef);
        for _ in 0..degree {
            monomial = monomial * Expression::coord(rng.random_range(0..4));
        }
        acc = acc + monomial;
    }
    acc
}

pub fn random_complex_polynomial(
    rng: &mut impl Rng,
    max_degree: u32,
    terms: usize,
) -> ComplexExpression {
    ComplexExpression::new(
        random_polynomial(rng, max_degree, terms),
        random_polynomial(rng, max_degree, terms),
    )
}

/// Random anti-Hermitian `n × n` matrix of polynomials.
pub fn random_anti_hermitian(rng: &mut impl Rng, n: usize, max_degree: u32) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, ComplexExpression::imag(random_polynomial(rng, max_degree, 2)));
        for j in i + 1..n {
            let z = random_complex_polynomial(rng, max_degree, 2);
            m.set(j, i, -z.conj());
            m.set(i, j, z);
        }
    }
    m
}

/// `exp(a + i b)` for affine `a`, `b` scaled by `k`.
fn random_complex_exp(rng: &mut impl Rng, k: f64) -> (ComplexExpression, ComplexExpression) {
    let a = random_linear(rng) * k;
    let b = random_linear(rng) * k;
    let forward = ComplexExpression::new(a.exp() * b.cos(), a.exp() * b.sin());
    let back = -&a;
    let backward = ComplexExpression::new(back.exp() * b.cos(), -(back.exp() * b.sin()));
    (forward, backward)
}

/// Unit lower-triangular `T` with affine entries times `diag(exp(a_i))`.
/// Lower-triangular means `L^α_4 = 0`, so the change maps standard bases to
/// standard bases.
pub fn random_standard_change(rng: &mut impl Rng) -> BasisChange<Expression> {
    let t = RealMatrix::from_fn(DIM5, DIM5, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Expression::one(),
        std::cmp::Ordering::Greater => random_linear(rng) * 0.3,
        std::cmp::Ordering::Less => Expression::zero(),
    });
    let exps: Vec<Expression> = (0..DIM5).map(|_| random_linear(rng) * 0.2).collect();
    let d = RealMatrix::from_fn(DIM5, DIM5, |i, j| {
        if i == j { exps[i].exp() } else { Expression::zero() }
    });
    let d_inv = RealMatrix::from_fn(DIM5, DIM5, |i, j| {
        if i == j { (-&exps[i]).exp() } else { Expression::zero() }
    });
    BasisChange::with_inverse(t.matmul(&d), d_inv.matmul(&t.inverse()))
}

/// Complex analog of [`random_standard_change`] on `n`-dimensional values.
pub fn random_gauge_change(rng: &mut impl Rng, n: usize) -> BasisChange<ComplexExpression> {
    let t = ComplexMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => ComplexExpression::one(),
        std::cmp::Ordering::Greater => {
            ComplexExpression::new(random_linear(rng) * 0.3, random_linear(rng) * 0.3)
        }
        std::cmp::Ordering::Less => ComplexExpression::zero(),
    });
    let pairs: Vec<_> = (0..n).map(|_| random_complex_exp(rng, 0.2)).collect();
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j { pairs[i].0.clone() } else { ComplexExpression::zero() }
    });
    let d_inv = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j { pairs[i].1.clone() } else { ComplexExpression::zero() }
    });
    BasisChange::with_inverse(t.matmul(&d), d_inv.matmul(&t.inverse()))
}

/// Random affine function `c + Σ a_μ x_μ` with coefficients in `[-1, 1]`.
pub fn random_linear(rng: &mut impl Rng) -> Expression {
    let mut acc = Expression::constant(rng.random_range(-1.0..=1.0));
    for mu in 0..4 {
        acc = acc + Expression::coord(mu) * rng.random_range(-1.0..=1.0);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_points_stay_in_box() {
        let chart = ChartBox::new([0.0, -2.0, 1.0, 3.0], [1.0, 2.0, 1.5, 4.0]);
        let pts = sample_points(chart, 7, 500, |_| true).unwrap();
        assert!(pts.iter().all(|p| chart.contains(p)));
    }

    #[test]
    fn same_seed_same_points() {
        let a = sample_points(ChartBox::unit(), 3, 20, |_| true).unwrap();
        let b = sample_points(ChartBox::unit(), 3, 20, |_| true).unwrap();
        let c = sample_points(ChartBox::unit(), 4, 20, |_| true).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejection_is_capped() {
        let err = sample_points(ChartBox::unit(), 1, 5, |_| false).unwrap_err();
        assert_eq!(err.found, 0);
        assert_eq!(err.tried, 50);
        let half = sample_points(ChartBox::unit(), 1, 50, |p| p[0] > 0.0).unwrap();
        assert!(half.iter().all(|p| p[0] > 0.0));
    }

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }
}
