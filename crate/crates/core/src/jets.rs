//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α f / α!` of a scalar quantity
//! for every multi-index `α` of total degree at most `order`, in `num_vars`
//! variables. Every derivative used elsewhere in the crate is read off a jet.
//!
//! # Multi-index enumeration
//!
//! Coefficients are stored in *graded lexicographic* order: multi-indices are
//! grouped by total degree (0, 1, 2, ...) and, inside a degree, sorted in
//! descending lexicographic order of their exponent tuples. For two variables
//! and order 2 the sequence is
//!
//! ```text
//! (0,0) (1,0) (0,1) (2,0) (1,1) (0,2)
//! ```
//!
//! so the degree-one block is `e_0, e_1, ...` and the layout of order `k - 1`
//! is a prefix of the layout of order `k`. This enumeration is frozen: reports
//! and tests depend on it.
//!
//! Operands of binary operations may have different orders; the result is
//! truncated to the smaller one. Mixing jets in different numbers of variables
//! is a programming error and panics.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooHigh(usize),
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("multi-index has length {got}, expected {expected}")]
    MultiIndexLength { got: usize, expected: usize },
    #[error("derivative of degree {degree} requested from a jet of order {order}")]
    DegreeExceedsOrder { degree: usize, order: usize },
    #[error("{op} is undefined at {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("constant-term matrix is singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, JetError>;

/// Monomial bookkeeping shared by all jets with the same `(num_vars, order)`.
#[derive(Debug)]
pub struct Layout {
    num_vars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    degree: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    // shift[k * num_vars + a] = index of exponents[k] + e_a (or NONE)
    shift: Vec<usize>,
    // products[i] = [(j, k)]: monomial i times monomial j is monomial k
    products: Vec<Vec<(u32, u32)>>,
    factorial: Vec<f64>,
}

const NONE: usize = usize::MAX;

impl Layout {
    fn build(num_vars: usize, order: usize) -> Layout {
        let mut exponents = Vec::new();
        let mut current = vec![0u8; num_vars];
        for d in 0..=order {
            push_degree(&mut exponents, &mut current, 0, d);
        }
        let degree: Vec<usize> = exponents
            .iter()
            .map(|e| e.iter().map(|&v| v as usize).sum())
            .collect();
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let mut shift = vec![NONE; exponents.len() * num_vars];
        for (k, e) in exponents.iter().enumerate() {
            if degree[k] < order {
                for a in 0..num_vars {
                    let mut up = e.clone();
                    up[a] += 1;
                    shift[k * num_vars + a] = index[&up];
                }
            }
        }
        let mut products = Vec::with_capacity(exponents.len());
        for (i, ei) in exponents.iter().enumerate() {
            let mut row = Vec::new();
            for (j, ej) in exponents.iter().enumerate() {
                if degree[i] + degree[j] <= order {
                    let sum: Vec<u8> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
                    row.push((j as u32, index[&sum] as u32));
                }
            }
            products.push(row);
        }
        let factorial = exponents
            .iter()
            .map(|e| e.iter().map(|&v| factorial(v as usize)).product())
            .collect();
        Layout {
            num_vars,
            order,
            exponents,
            degree,
            index,
            shift,
            products,
            factorial,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Multi-index stored at position `k`.
    pub fn multi_index(&self, k: usize) -> &[u8] {
        &self.exponents[k]
    }

    /// Total degree of the multi-index at position `k`.
    pub fn degree(&self, k: usize) -> usize {
        self.degree[k]
    }

    /// Position of a multi-index, if its degree fits this layout.
    pub fn position(&self, multi_index: &[u8]) -> Option<usize> {
        self.index.get(multi_index).copied()
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut [u8], var: usize, remaining: usize) {
    if var + 1 == current.len() {
        current[var] = remaining as u8;
        out.push(current.to_vec());
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e as u8;
        push_degree(out, current, var + 1, remaining - e);
    }
    current[var] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Number of multi-indices of degree ≤ `order` in `num_vars` variables.
pub fn layout_len(num_vars: usize, order: usize) -> usize {
    // binomial(num_vars + order, order)
    let mut acc: u128 = 1;
    for i in 1..=order as u128 {
        acc = acc * (num_vars as u128 + i) / i;
    }
    acc as usize
}

/// Shared layout for `(num_vars, order)`.
pub fn layout(num_vars: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("layout cache poisoned");
    guard
        .entry((num_vars, order))
        .or_insert_with(|| Arc::new(Layout::build(num_vars, order)))
        .clone()
}

/// Truncated Taylor expansion of a scalar around a point.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order())
            .field("num_vars", &self.num_vars())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(JetError::OrderTooHigh(order))
    } else {
        Ok(())
    }
}

impl Jet {
    /// Constant function.
    pub fn constant(value: f64, order: usize, num_vars: usize) -> Result<Jet> {
        check_order(order)?;
        let layout = layout(num_vars, order);
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Ok(Jet { layout, coeffs })
    }

    /// Jet of the coordinate function `z^index` expanded at `value`.
    pub fn variable(index: usize, value: f64, order: usize, num_vars: usize) -> Result<Jet> {
        check_order(order)?;
        if index >= num_vars {
            return Err(JetError::IndexOutOfRange { index, num_vars });
        }
        let mut jet = Jet::constant(value, order, num_vars)?;
        if order >= 1 {
            jet.coeffs[1 + index] = 1.0;
        }
        Ok(jet)
    }

    /// Builds a jet from raw Taylor coefficients in the documented enumeration.
    pub fn from_coeffs(coeffs: Vec<f64>, order: usize, num_vars: usize) -> Result<Jet> {
        check_order(order)?;
        let layout = layout(num_vars, order);
        if coeffs.len() != layout.len() {
            return Err(JetError::Shape(format!(
                "{} coefficients given, layout needs {}",
                coeffs.len(),
                layout.len()
            )));
        }
        Ok(Jet { layout, coeffs })
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Constant term.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Same layout, constant term replaced.
    pub fn constant_like(&self, value: f64) -> Jet {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        coeffs[0] = value;
        Jet {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    pub fn zero_like(&self) -> Jet {
        self.constant_like(0.0)
    }

    /// First partial `∂f/∂z^var` at the expansion point.
    pub fn first(&self, var: usize) -> f64 {
        if self.order() == 0 {
            return 0.0;
        }
        self.coeffs[1 + var]
    }

    /// The true mixed partial `∂^|α| f / ∂z^α` (Taylor coefficient times `α!`).
    pub fn partial(&self, multi_index: &[u8]) -> Result<f64> {
        if multi_index.len() != self.num_vars() {
            return Err(JetError::MultiIndexLength {
                got: multi_index.len(),
                expected: self.num_vars(),
            });
        }
        let degree: usize = multi_index.iter().map(|&v| v as usize).sum();
        if degree > self.order() {
            return Err(JetError::DegreeExceedsOrder {
                degree,
                order: self.order(),
            });
        }
        let k = self.layout.index[multi_index];
        Ok(self.coeffs[k] * self.layout.factorial[k])
    }

    /// Exact derivative `∂f/∂z^var` as a jet one order lower.
    pub fn derivative(&self, var: usize) -> Result<Jet> {
        let m = self.num_vars();
        if var >= m {
            return Err(JetError::IndexOutOfRange {
                index: var,
                num_vars: m,
            });
        }
        if self.order() == 0 {
            return Err(JetError::DegreeExceedsOrder {
                degree: 1,
                order: 0,
            });
        }
        let lower = layout(m, self.order() - 1);
        let coeffs = (0..lower.len())
            .map(|k| {
                let up = self.layout.shift[k * m + var];
                (lower.exponents[k][var] as f64 + 1.0) * self.coeffs[up]
            })
            .collect();
        Ok(Jet {
            layout: lower,
            coeffs,
        })
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let lower = layout(self.num_vars(), order);
        let coeffs = self.coeffs[..lower.len()].to_vec();
        Jet {
            layout: lower,
            coeffs,
        }
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add_scalar(&self, value: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn aligned<'a>(&'a self, other: &'a Jet) -> (Jet, Jet) {
        assert_eq!(
            self.num_vars(),
            other.num_vars(),
            "jets in different numbers of variables"
        );
        let order = self.order().min(other.order());
        (self.truncate(order), other.truncate(order))
    }

    fn multiply(&self, other: &Jet) -> Jet {
        let (a, b) = self.aligned(other);
        let mut out = vec![0.0; a.coeffs.len()];
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for &(j, k) in &a.layout.products[i] {
                out[k as usize] += ai * b.coeffs[j as usize];
            }
        }
        Jet {
            layout: a.layout,
            coeffs: out,
        }
    }

    /// `f(self)` for a univariate `f` given by its Taylor coefficients at the
    /// constant term of `self`.
    fn compose(&self, series: &[f64]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let order = self.order();
        let mut acc = self.constant_like(series[order]);
        for k in (0..order).rev() {
            acc = acc.multiply(&h);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    /// `self^power` for `power ≥ 0` by repeated squaring; exact at zero.
    fn pow_nonneg(&self, mut power: u32) -> Jet {
        let mut base = self.clone();
        let mut acc = self.constant_like(1.0);
        while power > 0 {
            if power & 1 == 1 {
                acc = acc.multiply(&base);
            }
            power >>= 1;
            if power > 0 {
                base = base.multiply(&base);
            }
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(JetError::Domain {
                op: "reciprocal",
                value: a,
            });
        }
        let series: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / a.powi(k as i32 + 1))
            .collect();
        Ok(self.compose(&series))
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet> {
        if other.value() == 0.0 {
            return Err(JetError::Domain {
                op: "division",
                value: 0.0,
            });
        }
        Ok(self.multiply(&other.recip()?))
    }

    /// Integer power; negative exponents need a nonzero constant term.
    pub fn powi(&self, power: i32) -> Result<Jet> {
        if power >= 0 {
            Ok(self.pow_nonneg(power as u32))
        } else {
            Ok(self.recip()?.pow_nonneg(power.unsigned_abs()))
        }
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.value();
        if a <= 0.0 || !a.is_finite() {
            return Err(JetError::Domain { op: "sqrt", value: a });
        }
        Ok(self.compose(&real_power_series(a, 0.5, self.order())))
    }

    pub fn exp(&self) -> Result<Jet> {
        let a = self.value();
        let e = a.exp();
        if !e.is_finite() {
            return Err(JetError::Domain { op: "exp", value: a });
        }
        let series: Vec<f64> = (0..=self.order()).map(|k| e / factorial(k)).collect();
        Ok(self.compose(&series))
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = self.value();
        if a <= 0.0 || !a.is_finite() {
            return Err(JetError::Domain { op: "log", value: a });
        }
        let series: Vec<f64> = (0..=self.order())
            .map(|k| match k {
                0 => a.ln(),
                _ => {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign / (k as f64 * a.powi(k as i32))
                }
            })
            .collect();
        Ok(self.compose(&series))
    }

    pub fn sin(&self) -> Jet {
        let a = self.value();
        let cycle = [a.sin(), a.cos(), -a.sin(), -a.cos()];
        let series: Vec<f64> = (0..=self.order())
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose(&series)
    }

    pub fn cos(&self) -> Jet {
        let a = self.value();
        let cycle = [a.cos(), -a.sin(), -a.cos(), a.sin()];
        let series: Vec<f64> = (0..=self.order())
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose(&series)
    }
}

// Taylor coefficients of t ↦ t^r at t = a.
fn real_power_series(a: f64, r: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut binom = 1.0;
    for k in 0..=order {
        out.push(binom * a.powf(r - k as f64));
        binom *= (r - k as f64) / (k as f64 + 1.0);
    }
    out
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let (mut a, b) = self.aligned(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let (mut a, b) = self.aligned(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.multiply(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Sum of products `Σ a_i b_i`.
pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    assert_eq!(a.len(), b.len());
    let mut iter = a.iter().zip(b);
    let (a0, b0) = iter.next().expect("empty dot product");
    iter.fold(a0 * b0, |acc, (x, y)| acc + x * y)
}

/// Tag distinguishing base coordinates from fibre coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Base,
    Fibre,
}

/// Expansion point of a jet evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub values: Vec<f64>,
    pub var_kinds: Vec<VarKind>,
}

impl JetPoint {
    /// A point of the base manifold (`x` only).
    pub fn base(x: &[f64]) -> JetPoint {
        JetPoint {
            values: x.to_vec(),
            var_kinds: vec![VarKind::Base; x.len()],
        }
    }

    /// A point of the tangent bundle: variables `x^1..x^n, y^1..y^n`.
    pub fn tangent(x: &[f64], y: &[f64]) -> JetPoint {
        assert_eq!(x.len(), y.len());
        let mut values = x.to_vec();
        values.extend_from_slice(y);
        let mut var_kinds = vec![VarKind::Base; x.len()];
        var_kinds.extend(std::iter::repeat_n(VarKind::Fibre, y.len()));
        JetPoint { values, var_kinds }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    /// Coordinate jets of every variable at this point.
    pub fn coordinate_jets(&self, order: usize) -> Result<Vec<Jet>> {
        let m = self.num_vars();
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(i, v, order, m))
            .collect()
    }
}

/// Solves `A x = b` over jets by Gaussian elimination. Pivots are chosen on
/// constant terms only: the jet ring is local, so a jet is invertible exactly
/// when its constant term is nonzero.
pub fn solve_linear_jets(a: &[Vec<Jet>], b: &[Jet]) -> Result<Vec<Jet>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(JetError::Shape(format!(
            "system matrix must be {n}x{n} to match the right-hand side"
        )));
    }
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |m, j| m.max(j.value().abs()));
    let mut m: Vec<Vec<Jet>> = a.to_vec();
    let mut rhs: Vec<Jet> = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                m[i][col]
                    .value()
                    .abs()
                    .total_cmp(&m[j][col].value().abs())
            })
            .expect("non-empty range");
        let pivot = m[pivot_row][col].value();
        if pivot.abs() <= 1e-14 * scale || pivot == 0.0 {
            return Err(JetError::Singular { column: col, pivot });
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let inv = m[col][col].recip()?;
        for row in col + 1..n {
            if m[row][col].max_abs() == 0.0 {
                continue;
            }
            let factor = &m[row][col] * &inv;
            for k in col..n {
                let update = &factor * &m[col][k];
                m[row][k] = &m[row][k] - &update;
            }
            let update = &factor * &rhs[col];
            rhs[row] = &rhs[row] - &update;
        }
    }
    let mut x: Vec<Option<Jet>> = vec![None; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            let xk = x[k].as_ref().expect("solved");
            acc = &acc - &(&m[row][k] * xk);
        }
        x[row] = Some(acc.try_div(&m[row][row])?);
    }
    Ok(x.into_iter().map(|v| v.expect("solved")).collect())
}

/// Determinant over jets by the same elimination.
pub fn determinant_jets(a: &[Vec<Jet>]) -> Result<Jet> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(JetError::Shape("determinant needs a square matrix".into()));
    }
    let mut m: Vec<Vec<Jet>> = a.to_vec();
    let mut det = m[0][0].constant_like(1.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                m[i][col]
                    .value()
                    .abs()
                    .total_cmp(&m[j][col].value().abs())
            })
            .expect("non-empty range");
        if m[pivot_row][col].value() == 0.0 {
            return Err(JetError::Singular {
                column: col,
                pivot: 0.0,
            });
        }
        if pivot_row != col {
            m.swap(col, pivot_row);
            det = -det;
        }
        det = &det * &m[col][col];
        let inv = m[col][col].recip()?;
        for row in col + 1..n {
            let factor = &m[row][col] * &inv;
            for k in col + 1..n {
                let update = &factor * &m[col][k];
                m[row][k] = &m[row][k] - &update;
            }
        }
    }
    Ok(det)
}

/// Central-difference estimate of a mixed partial derivative.
///
/// The `k`-th derivative in one variable uses the stencil
/// `Σ_j (-1)^j C(k,j) f(z + (k/2 - j) h) / h^k`; mixed partials take the
/// tensor product of the per-variable stencils. Independent of the jet engine.
pub fn finite_difference_oracle<F>(f: F, point: &[f64], multi_index: &[u8], step: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(point.len(), multi_index.len());
    assert!(step > 0.0, "finite-difference step must be positive");
    // (offsets in units of h, weight) per variable
    let stencils: Vec<Vec<(f64, f64)>> = multi_index
        .iter()
        .map(|&k| {
            let k = k as usize;
            (0..=k)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    (k as f64 / 2.0 - j as f64, sign * binomial(k, j))
                })
                .collect()
        })
        .collect();
    let degree: i32 = multi_index.iter().map(|&k| k as i32).sum();
    let mut total = 0.0;
    let mut z = point.to_vec();
    let mut counters = vec![0usize; point.len()];
    loop {
        let mut weight = 1.0;
        for (v, stencil) in stencils.iter().enumerate() {
            let (offset, w) = stencil[counters[v]];
            z[v] = point[v] + offset * step;
            weight *= w;
        }
        total += weight * f(&z);
        // odometer over stencil entries
        let mut v = 0;
        loop {
            if v == point.len() {
                return total / step.powi(degree);
            }
            counters[v] += 1;
            if counters[v] < stencils[v].len() {
                break;
            }
            counters[v] = 0;
            v += 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
