//! Antisymmetric forms with scalar or tensor values.
//!
//! A rank-`m` form stores one value vector per strictly increasing index
//! tuple `K = (k_1 < … < k_m)`; these are the components `t_{|K|}` of
//! `t = t_{|K|} o^{k_1} ∧ … ∧ o^{k_m}`. Components on other tuples follow
//! from the permutation sign and are never stored.
//!
//! Exterior derivatives act on components only:
//! `(dt)_K = Σ_p (-1)^p ∇_{k_p} t_{K∖k_p}`, where `∇_A` is the supplied
//! [`ValueConnection`] acting on the values. `d^∇` is the same operator with
//! the fifth slice of the value connection removed.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::connection::Connection;
use crate::expr::{ComplexExpression, EvalError, Expression};
use crate::linalg::ComplexMatrix;
use crate::{Point, DIM5, FIFTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexKind {
    /// Space-time indices `0..4`.
    Four,
    /// Five-vector indices `0..5`.
    Five,
}

impl IndexKind {
    pub fn dim(self) -> usize {
        match self {
            IndexKind::Four => 4,
            IndexKind::Five => DIM5,
        }
    }
}

/// Space in which form values live. Component layout of a tensor space is
/// row-major over upper indices followed by lower indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueSpace {
    Scalar,
    Nonspacetime { upper: usize, lower: usize, n: usize },
    FiveTensor { upper: usize, lower: usize },
    Product(Box<ValueSpace>, Box<ValueSpace>),
}

impl ValueSpace {
    pub fn nonspacetime_vector(n: usize) -> Self {
        ValueSpace::Nonspacetime {
            upper: 1,
            lower: 0,
            n,
        }
    }

    pub fn nonspacetime_covector(n: usize) -> Self {
        ValueSpace::Nonspacetime {
            upper: 0,
            lower: 1,
            n,
        }
    }

    pub fn nonspacetime_operator(n: usize) -> Self {
        ValueSpace::Nonspacetime {
            upper: 1,
            lower: 1,
            n,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ValueSpace::Scalar => 1,
            ValueSpace::Nonspacetime { upper, lower, n } => n.pow((upper + lower) as u32),
            ValueSpace::FiveTensor { upper, lower } => DIM5.pow((upper + lower) as u32),
            ValueSpace::Product(a, b) => a.dim() * b.dim(),
        }
    }

    /// `(upper, lower, n)` of a tensor space.
    fn tensor_shape(&self) -> Option<(usize, usize, usize, bool)> {
        match *self {
            ValueSpace::Nonspacetime { upper, lower, n } => Some((upper, lower, n, false)),
            ValueSpace::FiveTensor { upper, lower } => Some((upper, lower, DIM5, true)),
            _ => None,
        }
    }

    fn with_shape(upper: usize, lower: usize, n: usize, five: bool) -> Self {
        if upper + lower == 0 {
            ValueSpace::Scalar
        } else if five {
            ValueSpace::FiveTensor { upper, lower }
        } else {
            ValueSpace::Nonspacetime { upper, lower, n }
        }
    }

    /// Space of `a ⊗ b` with the value layout `a_index * b.dim() + b_index`.
    pub fn tensor(a: &ValueSpace, b: &ValueSpace) -> ValueSpace {
        match (a, b) {
            (ValueSpace::Scalar, other) | (other, ValueSpace::Scalar) => other.clone(),
            _ => match (a.tensor_shape(), b.tensor_shape()) {
                // layouts agree only when the first factor has no lower and
                // the second no upper indices
                (Some((u1, 0, n1, f1)), Some((0, l2, n2, f2))) if n1 == n2 && f1 == f2 => {
                    ValueSpace::with_shape(u1, l2, n1, f1)
                }
                _ => ValueSpace::Product(Box::new(a.clone()), Box::new(b.clone())),
            },
        }
    }
}

impl fmt::Display for ValueSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSpace::Scalar => write!(f, "scalar"),
            ValueSpace::Nonspacetime { upper, lower, n } => {
                write!(f, "nonspacetime ({upper},{lower}) over dimension {n}")
            }
            ValueSpace::FiveTensor { upper, lower } => write!(f, "five-tensor ({upper},{lower})"),
            ValueSpace::Product(a, b) => write!(f, "{a} ⊗ {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormsError {
    #[error("rank {rank} exceeds the index dimension {dim}")]
    RankOverflow { rank: usize, dim: usize },
    #[error("forms carry different index kinds")]
    IndexKindMismatch,
    #[error("values in {0} and {1} do not contract")]
    NotContractible(ValueSpace, ValueSpace),
    #[error("a value connection is required to differentiate {0}-valued forms")]
    MissingConnection(ValueSpace),
    #[error("value connection acts on {connection}, form values live in {form}")]
    ConnectionSpaceMismatch {
        connection: ValueSpace,
        form: ValueSpace,
    },
    #[error("expected {expected} value components, got {found}")]
    ValueLength { expected: usize, found: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Value vector of one stored component.
pub type Values = Vec<ComplexExpression>;

#[derive(Debug, Clone)]
pub struct FormField {
    kind: IndexKind,
    rank: usize,
    space: ValueSpace,
    tuples: Vec<Vec<usize>>,
    comps: Vec<Values>,
}

fn increasing_tuples(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    (0..dim).combinations(rank).collect()
}

/// Sorts `index` and returns the permutation sign, or `None` when an index
/// repeats.
pub fn sort_with_sign(index: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut sorted = index.to_vec();
    let mut sign = 1.0;
    for i in 0..sorted.len() {
        for j in 0..sorted.len() - 1 - i {
            if sorted[j] > sorted[j + 1] {
                sorted.swap(j, j + 1);
                sign = -sign;
            } else if sorted[j] == sorted[j + 1] {
                return None;
            }
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, sorted))
}

fn zero_values(dim: usize) -> Values {
    vec![ComplexExpression::zero(); dim]
}

fn add_values(a: &[ComplexExpression], b: &[ComplexExpression]) -> Values {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale_values(a: &[ComplexExpression], k: f64) -> Values {
    if k == 1.0 {
        return a.to_vec();
    }
    a.iter()
        .map(|x| ComplexExpression::new(&x.re * k, &x.im * k))
        .collect()
}

impl FormField {
    pub fn zero(kind: IndexKind, rank: usize, space: ValueSpace) -> Result<Self, FormsError> {
        if rank > kind.dim() {
            return Err(FormsError::RankOverflow {
                rank,
                dim: kind.dim(),
            });
        }
        let tuples = increasing_tuples(kind.dim(), rank);
        let comps = vec![zero_values(space.dim()); tuples.len()];
        Ok(Self {
            kind,
            rank,
            space,
            tuples,
            comps,
        })
    }

    /// Builds the form from its values on increasing tuples.
    pub fn from_fn(
        kind: IndexKind,
        rank: usize,
        space: ValueSpace,
        mut f: impl FnMut(&[usize]) -> Values,
    ) -> Result<Self, FormsError> {
        let mut form = Self::zero(kind, rank, space)?;
        for slot in 0..form.tuples.len() {
            let values = f(&form.tuples[slot]);
            if values.len() != form.space.dim() {
                return Err(FormsError::ValueLength {
                    expected: form.space.dim(),
                    found: values.len(),
                });
            }
            form.comps[slot] = values;
        }
        Ok(form)
    }

    /// Scalar-valued 0-form.
    pub fn function(kind: IndexKind, f: ComplexExpression) -> Self {
        Self::from_fn(kind, 0, ValueSpace::Scalar, |_| vec![f.clone()]).expect("rank 0")
    }

    /// Scalar-valued real 1-form `Σ c_A o^A`.
    pub fn one_form(kind: IndexKind, c: &[Expression]) -> Self {
        Self::from_fn(kind, 1, ValueSpace::Scalar, |k| {
            vec![ComplexExpression::real(c[k[0]].clone())]
        })
        .expect("rank 1")
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn space(&self) -> &ValueSpace {
        &self.space
    }

    /// Strictly increasing index tuples, in storage order.
    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    fn slot(&self, sorted: &[usize]) -> usize {
        self.tuples
            .iter()
            .position(|t| t == sorted)
            .expect("index tuple out of range")
    }

    /// Stored values on an increasing tuple.
    pub fn get(&self, sorted: &[usize]) -> &Values {
        &self.comps[self.slot(sorted)]
    }

    pub fn set(&mut self, sorted: &[usize], values: Values) {
        assert_eq!(values.len(), self.space.dim(), "value length");
        let slot = self.slot(sorted);
        self.comps[slot] = values;
    }

    /// Values on an arbitrary index tuple, signed by the permutation.
    pub fn component(&self, index: &[usize]) -> Values {
        assert_eq!(index.len(), self.rank);
        match sort_with_sign(index) {
            None => zero_values(self.space.dim()),
            Some((sign, sorted)) => scale_values(self.get(&sorted), sign),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize], &Values)> {
        self.tuples.iter().map(Vec::as_slice).zip(self.comps.iter())
    }

    pub fn all_values(&self) -> impl Iterator<Item = &ComplexExpression> {
        self.comps.iter().flatten()
    }

    /// True when every stored value is the literal constant zero.
    pub fn is_symbolically_zero(&self) -> bool {
        self.all_values().all(ComplexExpression::is_zero)
    }

    pub fn max_norm(&self, points: &[Point]) -> Result<f64, EvalError> {
        crate::expr::max_norm_over(self.all_values(), points)
    }

    fn same_shape(&self, other: &Self) -> Result<(), FormsError> {
        if self.kind != other.kind || self.rank != other.rank {
            return Err(FormsError::IndexKindMismatch);
        }
        if self.space != other.space {
            return Err(FormsError::NotContractible(
                self.space.clone(),
                other.space.clone(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormsError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            *a = add_values(a, b);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormsError> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        for a in out.comps.iter_mut() {
            *a = scale_values(a, k);
        }
        out
    }

    /// Keeps the components with index pattern selected by `keep`.
    fn filtered(&self, keep: impl Fn(&[usize]) -> bool) -> Self {
        let mut out = self.clone();
        for (t, values) in out.tuples.iter().zip(out.comps.iter_mut()) {
            if !keep(t) {
                *values = zero_values(self.space.dim());
            }
        }
        out
    }

    /// Z-part: the components free of index 4.
    pub fn z_part(&self) -> Self {
        self.filtered(|t| !t.contains(&FIFTH))
    }

    /// E-part: the components carrying index 4.
    pub fn e_part(&self) -> Self {
        self.filtered(|t| t.contains(&FIFTH))
    }

    /// Applies `f` to the values of every component.
    pub fn map_values(&self, space: ValueSpace, f: impl Fn(&Values) -> Values) -> Self {
        let comps: Vec<Values> = self.comps.iter().map(f).collect();
        assert!(comps.iter().all(|v| v.len() == space.dim()));
        Self {
            kind: self.kind,
            rank: self.rank,
            space,
            tuples: self.tuples.clone(),
            comps,
        }
    }
}

/// Sign of the shuffle that puts the positions `first` ahead of the
/// remaining positions of a sorted tuple.
fn shuffle_sign(first: &[usize]) -> f64 {
    let m = first.len();
    let moves: usize = first.iter().sum::<usize>() - m * (m.saturating_sub(1)) / 2;
    if moves % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(S ∧ T)_K = Σ sign(I, J) S_I ⊗ T_J` over splits of `K` into increasing
/// `I` and `J`, with the value product `product`.
fn combine(
    s: &FormField,
    t: &FormField,
    space: ValueSpace,
    product: impl Fn(&Values, &Values) -> Values,
) -> Result<FormField, FormsError> {
    if s.kind != t.kind {
        return Err(FormsError::IndexKindMismatch);
    }
    let rank = s.rank + t.rank;
    let mut out = FormField::zero(s.kind, rank, space)?;
    for slot in 0..out.tuples.len() {
        let k = out.tuples[slot].clone();
        let mut acc = zero_values(out.space.dim());
        for positions in (0..rank).combinations(s.rank) {
            let i: Vec<usize> = positions.iter().map(|&p| k[p]).collect();
            let j: Vec<usize> = (0..rank)
                .filter(|p| !positions.contains(p))
                .map(|p| k[p])
                .collect();
            let (si, tj) = (s.get(&i), t.get(&j));
            if si.iter().all(ComplexExpression::is_zero) || tj.iter().all(ComplexExpression::is_zero)
            {
                continue;
            }
            let term = product(si, tj);
            acc = add_values(&acc, &scale_values(&term, shuffle_sign(&positions)));
        }
        out.comps[slot] = acc;
    }
    Ok(out)
}

fn tensor_values(a: &Values, b: &Values) -> Values {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(if x.is_zero() || y.is_zero() {
                ComplexExpression::zero()
            } else {
                x * y
            });
        }
    }
    out
}

/// `S ∧ T` with values combined by the tensor product.
pub fn wedge(s: &FormField, t: &FormField) -> Result<FormField, FormsError> {
    let space = ValueSpace::tensor(&s.space, &t.space);
    combine(s, t, space, tensor_values)
}

/// How two value spaces contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Contraction {
    /// Scalar times anything.
    ScaleLeft,
    ScaleRight,
    /// `s^i t_i` or `s_i t^i`.
    Pairing,
    /// `(F S)^i = F^i_j S^j`.
    OperatorVector,
    /// `(v F)_j = v_i F^i_j`.
    CovectorOperator,
}

fn contraction_rule(a: &ValueSpace, b: &ValueSpace) -> Option<(Contraction, ValueSpace)> {
    match (a, b) {
        (ValueSpace::Scalar, _) => return Some((Contraction::ScaleLeft, b.clone())),
        (_, ValueSpace::Scalar) => return Some((Contraction::ScaleRight, a.clone())),
        _ => {}
    }
    let (ua, la, na, fa) = a.tensor_shape()?;
    let (ub, lb, nb, fb) = b.tensor_shape()?;
    if na != nb || fa != fb {
        return None;
    }
    match ((ua, la), (ub, lb)) {
        ((1, 0), (0, 1)) | ((0, 1), (1, 0)) => Some((Contraction::Pairing, ValueSpace::Scalar)),
        ((1, 1), (1, 0)) => Some((
            Contraction::OperatorVector,
            ValueSpace::with_shape(1, 0, na, fa),
        )),
        ((0, 1), (1, 1)) => Some((
            Contraction::CovectorOperator,
            ValueSpace::with_shape(0, 1, na, fa),
        )),
        _ => None,
    }
}

fn mul_acc(acc: &mut ComplexExpression, x: &ComplexExpression, y: &ComplexExpression) {
    if !x.is_zero() && !y.is_zero() {
        *acc = &*acc + x * y;
    }
}

fn contract_values(rule: Contraction, n: usize, a: &Values, b: &Values) -> Values {
    match rule {
        Contraction::ScaleLeft => b.iter().map(|y| &a[0] * y).collect(),
        Contraction::ScaleRight => a.iter().map(|x| x * &b[0]).collect(),
        Contraction::Pairing => {
            let mut acc = ComplexExpression::zero();
            for (x, y) in a.iter().zip(b) {
                mul_acc(&mut acc, x, y);
            }
            vec![acc]
        }
        Contraction::OperatorVector => (0..n)
            .map(|i| {
                let mut acc = ComplexExpression::zero();
                for j in 0..n {
                    mul_acc(&mut acc, &a[i * n + j], &b[j]);
                }
                acc
            })
            .collect(),
        Contraction::CovectorOperator => (0..n)
            .map(|j| {
                let mut acc = ComplexExpression::zero();
                for i in 0..n {
                    mul_acc(&mut acc, &a[i], &b[i * n + j]);
                }
                acc
            })
            .collect(),
    }
}

/// `≺S ∧ T≻`: the wedge product followed by contraction of the values.
pub fn value_contract(s: &FormField, t: &FormField) -> Result<FormField, FormsError> {
    let (rule, space) = contraction_rule(&s.space, &t.space)
        .ok_or_else(|| FormsError::NotContractible(s.space.clone(), t.space.clone()))?;
    let n = s
        .space
        .tensor_shape()
        .or(t.space.tensor_shape())
        .map_or(1, |(_, _, n, _)| n);
    combine(s, t, space, move |a, b| contract_values(rule, n, a, b))
}

/// Covariant derivative on values: `∇_A t = ∂_A t + Γ_A t`.
#[derive(Debug, Clone)]
pub struct ValueConnection {
    space: ValueSpace,
    gamma: Vec<ComplexMatrix>,
}

impl ValueConnection {
    /// Five coefficient matrices `Γ_A`, one per direction; four-index forms
    /// use the first four.
    pub fn new(space: ValueSpace, gamma: Vec<ComplexMatrix>) -> Self {
        assert_eq!(gamma.len(), DIM5, "one coefficient matrix per direction");
        for g in &gamma {
            assert_eq!((g.rows(), g.cols()), (space.dim(), space.dim()));
        }
        Self { space, gamma }
    }

    pub fn trivial(space: ValueSpace) -> Self {
        let dim = space.dim();
        Self::new(space, vec![ComplexMatrix::zeros(dim, dim); DIM5])
    }

    /// `Γ_A = B_A` on vectors, with `(B_A)^i_j = B^i_{jA}`.
    pub fn vector(b: &[ComplexMatrix]) -> Self {
        let n = b[0].rows();
        Self::new(ValueSpace::nonspacetime_vector(n), b.to_vec())
    }

    /// `Γ_A = -B_Aᵀ` on linear forms.
    pub fn covector(b: &[ComplexMatrix]) -> Self {
        let n = b[0].rows();
        Self::new(
            ValueSpace::nonspacetime_covector(n),
            b.iter().map(|m| m.transpose().neg()).collect(),
        )
    }

    /// `(Γ_A T)^i_j = B^i_{kA} T^k_j - T^i_k B^k_{jA}` on rank (1,1) values.
    pub fn operator(b: &[ComplexMatrix]) -> Self {
        let n = b[0].rows();
        Self::new(
            ValueSpace::nonspacetime_operator(n),
            b.iter().map(operator_action).collect(),
        )
    }

    /// The five-vector connection acting on five-tensor values of rank
    /// (1,0), (0,1) or (1,1). Forms differentiate along coordinates, so `h`
    /// must be in the coordinate frame.
    pub fn from_connection(h: &Connection, upper: usize, lower: usize) -> Option<Self> {
        let slices: Vec<ComplexMatrix> = (0..DIM5).map(|a| h.slice(a).to_complex()).collect();
        let gamma = match (upper, lower) {
            (1, 0) => slices,
            (0, 1) => slices.iter().map(|m| m.transpose().neg()).collect(),
            (1, 1) => slices.iter().map(operator_action).collect(),
            _ => return None,
        };
        Some(Self::new(ValueSpace::FiveTensor { upper, lower }, gamma))
    }

    pub fn space(&self) -> &ValueSpace {
        &self.space
    }

    pub fn gamma(&self, a: usize) -> &ComplexMatrix {
        &self.gamma[a]
    }

    /// Copy with `Γ_4 = 0`.
    pub fn suppress_fifth(&self) -> Self {
        let mut out = self.clone();
        let dim = self.space.dim();
        out.gamma[FIFTH] = ComplexMatrix::zeros(dim, dim);
        out
    }

    /// Copy with `Γ_A` replaced by `Γ_A + δΓ_A`.
    pub fn perturbed(&self, delta: &[ComplexMatrix]) -> Self {
        let gamma = self
            .gamma
            .iter()
            .zip(delta)
            .map(|(g, d)| g.add(d))
            .collect();
        Self::new(self.space.clone(), gamma)
    }

    /// `∂_A t + Γ_A t`.
    pub fn covariant(&self, values: &[ComplexExpression], a: usize) -> Values {
        let gamma = &self.gamma[a];
        (0..values.len())
            .map(|r| {
                let mut acc = values[r].partial(a);
                for (c, v) in values.iter().enumerate() {
                    mul_acc(&mut acc, gamma.get(r, c), v);
                }
                acc
            })
            .collect()
    }

    /// `∇_w t = w^A ∇_A t` for a direction field `w` with `dim` components.
    pub fn directional(&self, values: &[ComplexExpression], w: &[ComplexExpression]) -> Values {
        let mut acc = zero_values(values.len());
        for (a, wa) in w.iter().enumerate() {
            if wa.is_zero() {
                continue;
            }
            let d = self.covariant(values, a);
            acc = acc
                .iter()
                .zip(&d)
                .map(|(x, y)| {
                    let mut z = x.clone();
                    mul_acc(&mut z, wa, y);
                    z
                })
                .collect();
        }
        acc
    }
}

/// The matrix of `T ↦ B T - T B` on row-major rank (1,1) components.
fn operator_action(b: &ComplexMatrix) -> ComplexMatrix {
    let n = b.rows();
    ComplexMatrix::from_fn(n * n, n * n, |row, col| {
        let (i, j) = (row / n, row % n);
        let (k, l) = (col / n, col % n);
        let mut acc = ComplexExpression::zero();
        if j == l {
            acc = acc + b.get(i, k).clone();
        }
        if i == k {
            acc = acc - b.get(l, j).clone();
        }
        acc
    })
}

/// Exterior derivative `d` with the value connection `connection`.
pub fn exterior_d(
    t: &FormField,
    connection: Option<&ValueConnection>,
) -> Result<FormField, FormsError> {
    let trivial;
    let conn = match connection {
        Some(c) => {
            if c.space != t.space {
                return Err(FormsError::ConnectionSpaceMismatch {
                    connection: c.space.clone(),
                    form: t.space.clone(),
                });
            }
            c
        }
        None if t.space == ValueSpace::Scalar => {
            trivial = ValueConnection::trivial(ValueSpace::Scalar);
            &trivial
        }
        None => return Err(FormsError::MissingConnection(t.space.clone())),
    };
    let mut out = FormField::zero(t.kind, t.rank + 1, t.space.clone())?;
    for slot in 0..out.tuples.len() {
        let k = out.tuples[slot].clone();
        let mut acc = zero_values(t.space.dim());
        for p in 0..k.len() {
            let rest: Vec<usize> = k
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != p)
                .map(|(_, &x)| x)
                .collect();
            let values = t.get(&rest);
            if values.iter().all(ComplexExpression::is_zero) {
                continue;
            }
            let term = conn.covariant(values, k[p]);
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            acc = add_values(&acc, &scale_values(&term, sign));
        }
        out.comps[slot] = acc;
    }
    Ok(out)
}

/// `d^∇`: the exterior derivative with the fifth slice of the value
/// connection suppressed.
pub fn exterior_d_nabla(
    t: &FormField,
    connection: Option<&ValueConnection>,
) -> Result<FormField, FormsError> {
    let suppressed = connection.map(ValueConnection::suppress_fifth);
    exterior_d(t, suppressed.as_ref())
}

/// `d≺S∧T≻ - ≺dS∧T≻ - (-1)^m ≺S∧dT≻`.
pub fn leibniz_defect(
    s: &FormField,
    s_conn: Option<&ValueConnection>,
    t: &FormField,
    t_conn: Option<&ValueConnection>,
) -> Result<FormField, FormsError> {
    let st = value_contract(s, t)?;
    let st_conn = if st.space == ValueSpace::Scalar {
        None
    } else {
        return Err(FormsError::NotContractible(
            s.space.clone(),
            t.space.clone(),
        ));
    };
    let lhs = exterior_d(&st, st_conn)?;
    let first = value_contract(&exterior_d(s, s_conn)?, t)?;
    let sign = if s.rank % 2 == 0 { 1.0 } else { -1.0 };
    let second = value_contract(s, &exterior_d(t, t_conn)?)?.scale(sign);
    lhs.sub(&first)?.sub(&second)
}

/// Full-sum pairing `⟨S, U_1 ∧ … ∧ U_m⟩ = S_{a_1…a_m} U_1^{a_1} ⋯ U_m^{a_m}`,
/// evaluated as `Σ_K S_K det[U_i^{k_j}]`.
pub fn pair(s: &FormField, vectors: &[Vec<ComplexExpression>]) -> Values {
    assert_eq!(vectors.len(), s.rank, "one vector per form slot");
    let mut acc = zero_values(s.space.dim());
    for (k, values) in s.entries() {
        if values.iter().all(ComplexExpression::is_zero) {
            continue;
        }
        let minor = ComplexMatrix::from_fn(s.rank, s.rank, |i, j| vectors[i][k[j]].clone());
        let det = minor.det();
        if det.is_zero() {
            continue;
        }
        for (slot, v) in acc.iter_mut().zip(values) {
            mul_acc(slot, &det, v);
        }
    }
    acc
}

/// Component bracket `[U,V]^a = U^b ∂_b V^a - V^b ∂_b U^a`. With five
/// components the fifth derivative is zero, which makes this the naive
/// five-vector bracket.
pub fn bracket(u: &[ComplexExpression], v: &[ComplexExpression]) -> Vec<ComplexExpression> {
    let dim = u.len();
    (0..dim)
        .map(|a| {
            let mut acc = ComplexExpression::zero();
            for b in 0..dim {
                mul_acc(&mut acc, &u[b], &v[a].partial(b));
                let dv = u[a].partial(b);
                if !dv.is_zero() && !v[b].is_zero() {
                    acc = acc - &v[b] * dv;
                }
            }
            acc
        })
        .collect()
}

/// Coordinate-free value of `⟨dS, U_0 ∧ … ∧ U_m⟩`:
/// `Σ_i (-1)^i ∇_{U_i}⟨S, …Û_i…⟩ + Σ_{i<j} (-1)^{i+j} ⟨S, [U_i,U_j] ∧ …Û_i…Û_j…⟩`.
pub fn coordinate_free_d(
    s: &FormField,
    connection: Option<&ValueConnection>,
    vectors: &[Vec<ComplexExpression>],
) -> Result<Values, FormsError> {
    let m = s.rank;
    assert_eq!(vectors.len(), m + 1);
    let trivial = ValueConnection::trivial(s.space.clone());
    let conn = match connection {
        Some(c) => c,
        None if s.space == ValueSpace::Scalar => &trivial,
        None => return Err(FormsError::MissingConnection(s.space.clone())),
    };
    let mut acc = zero_values(s.space.dim());
    for i in 0..=m {
        let others: Vec<Vec<ComplexExpression>> = vectors
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != i)
            .map(|(_, v)| v.clone())
            .collect();
        let inner = pair(s, &others);
        let term = conn.directional(&inner, &vectors[i]);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc = add_values(&acc, &scale_values(&term, sign));
    }
    for i in 0..=m {
        for j in i + 1..=m {
            let mut args = vec![bracket(&vectors[i], &vectors[j])];
            args.extend(
                vectors
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != i && q != j)
                    .map(|(_, v)| v.clone()),
            );
            let term = pair(s, &args);
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            acc = add_values(&acc, &scale_values(&term, sign));
        }
    }
    Ok(acc)
}
