//! Bivariate truncated Taylor arithmetic.
//!
//! A [`Jet`] of order `n` carries every partial derivative `∂₁ᵃ∂₂ᵇ f` with
//! `a + b ≤ n` of a scalar field at one point. Internally the coefficients are
//! stored Taylor-scaled (divided by `a!·b!`), which turns products into plain
//! Cauchy products; the public accessors always return raw derivatives.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::expr::Var;
use crate::{Error, Result};

/// Highest derivative order a jet can carry.
pub const MAX_ORDER: usize = 4;

const CAPACITY: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;
const FACTORIAL: [f64; MAX_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Storage slot of the coefficient of `x₁ᵃ x₂ᵇ`: grouped by total degree,
/// then by increasing power of `x₂`.
#[inline]
const fn slot(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

/// Number of coefficients stored by a jet of the given order.
#[inline]
pub const fn coefficient_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Iterates over `(a, b)` exponent pairs in storage order.
pub fn multi_indices(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|d| (0..=d).map(move |b| (d - b, b)))
}

/// Truncated bivariate Taylor expansion of a scalar field at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    order: usize,
    taylor: [f64; CAPACITY],
}

impl Jet {
    /// Jet of a constant function.
    ///
    /// # Panics
    ///
    /// Panics if `order > MAX_ORDER`.
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut taylor = [0.0; CAPACITY];
        taylor[0] = value;
        Self { order, taylor }
    }

    /// Jet of the coordinate function `var` evaluated at `value`.
    pub fn variable(var: Var, value: f64, order: usize) -> Self {
        let mut jet = Self::constant(value, order);
        if order >= 1 {
            match var {
                Var::X1 => jet.taylor[slot(1, 0)] = 1.0,
                Var::X2 => jet.taylor[slot(0, 1)] = 1.0,
            }
        }
        jet
    }

    /// Builds a jet from raw partial derivatives listed in [`multi_indices`] order.
    ///
    /// # Panics
    ///
    /// Panics if `order > MAX_ORDER` or the slice length does not match the order.
    pub fn from_derivatives(order: usize, derivatives: &[f64]) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        assert_eq!(derivatives.len(), coefficient_count(order));
        let mut taylor = [0.0; CAPACITY];
        for ((a, b), &d) in multi_indices(order).zip(derivatives) {
            taylor[slot(a, b)] = d / (FACTORIAL[a] * FACTORIAL[b]);
        }
        Self { order, taylor }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.taylor[0]
    }

    /// Number of stored coefficients, `(order + 1)(order + 2) / 2`.
    pub fn len(&self) -> usize {
        coefficient_count(self.order)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Raw partial derivative `∂₁ᵃ∂₂ᵇ f`.
    ///
    /// # Panics
    ///
    /// Panics if `a + b` exceeds the jet's order.
    pub fn derivative(&self, a: usize, b: usize) -> f64 {
        assert!(
            a + b <= self.order,
            "derivative ({a}, {b}) not available in a jet of order {}",
            self.order
        );
        self.taylor[slot(a, b)] * FACTORIAL[a] * FACTORIAL[b]
    }

    /// All raw partial derivatives in [`multi_indices`] order.
    pub fn derivatives(&self) -> Vec<f64> {
        multi_indices(self.order)
            .map(|(a, b)| self.derivative(a, b))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.taylor[..self.len()].iter().all(|c| c.is_finite())
    }

    /// Drops all coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut taylor = [0.0; CAPACITY];
        let n = coefficient_count(order);
        taylor[..n].copy_from_slice(&self.taylor[..n]);
        Self { order, taylor }
    }

    /// Partial derivative along `var`; the result has one order less.
    ///
    /// # Panics
    ///
    /// Panics on a jet of order zero.
    pub fn partial(&self, var: Var) -> Self {
        assert!(self.order >= 1, "cannot differentiate a jet of order 0");
        let order = self.order - 1;
        let mut taylor = [0.0; CAPACITY];
        for (a, b) in multi_indices(order) {
            taylor[slot(a, b)] = match var {
                Var::X1 => (a + 1) as f64 * self.taylor[slot(a + 1, b)],
                Var::X2 => (b + 1) as f64 * self.taylor[slot(a, b + 1)],
            };
        }
        Self { order, taylor }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let order = self.order.min(rhs.order);
        let mut taylor = [0.0; CAPACITY];
        for (i, t) in taylor.iter_mut().enumerate().take(coefficient_count(order)) {
            *t = f(self.taylor[i], rhs.taylor[i]);
        }
        Self { order, taylor }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut taylor = [0.0; CAPACITY];
        for (i, t) in taylor.iter_mut().enumerate().take(self.len()) {
            *t = f(self.taylor[i]);
        }
        Self {
            order: self.order,
            taylor,
        }
    }

    fn product(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut taylor = [0.0; CAPACITY];
        for (a, b) in multi_indices(order) {
            let mut acc = 0.0;
            for i in 0..=a {
                for j in 0..=b {
                    acc += self.taylor[slot(i, j)] * rhs.taylor[slot(a - i, b - j)];
                }
            }
            taylor[slot(a, b)] = acc;
        }
        Self { order, taylor }
    }

    /// Quotient `self / rhs`; fails when `rhs` has a zero value term.
    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        let g0 = rhs.taylor[0];
        if g0 == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.order.min(rhs.order);
        let mut taylor = [0.0; CAPACITY];
        for (a, b) in multi_indices(order) {
            let mut acc = self.taylor[slot(a, b)];
            for i in 0..=a {
                for j in 0..=b {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    acc -= rhs.taylor[slot(i, j)] * taylor[slot(a - i, b - j)];
                }
            }
            taylor[slot(a, b)] = acc / g0;
        }
        Ok(Self { order, taylor })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(1.0, self.order).try_div(self)
    }

    /// Evaluates `Σ s_k (self - self(x))^k`, where `s_k = f⁽ᵏ⁾(u₀)/k!` are the
    /// univariate Taylor coefficients of an outer function at `u₀ = self.value()`.
    fn compose(&self, series: &Series) -> Self {
        let mut delta = *self;
        delta.taylor[0] = 0.0;
        let mut acc = Self::constant(series[self.order], self.order);
        for k in (0..self.order).rev() {
            acc = acc.product(&delta);
            acc.taylor[0] += series[k];
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&std::array::from_fn(|k| e / FACTORIAL[k]))
    }

    pub fn ln(&self) -> Result<Self> {
        let u = self.value();
        if u <= 0.0 || u.is_nan() {
            return Err(Error::Domain {
                function: "log",
                value: u,
            });
        }
        let mut s = [u.ln(), 0.0, 0.0, 0.0, 0.0];
        let mut p = 1.0;
        for (k, c) in s.iter_mut().enumerate().skip(1) {
            p /= u;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *c = sign * p / k as f64;
        }
        Ok(self.compose(&s))
    }

    pub fn sqrt(&self) -> Result<Self> {
        let u = self.value();
        if u <= 0.0 || u.is_nan() {
            return Err(Error::Domain {
                function: "sqrt",
                value: u,
            });
        }
        const BINOM_HALF: [f64; 5] = [1.0, 0.5, -0.125, 0.0625, -0.0390625];
        let root = u.sqrt();
        let mut p = root;
        let mut s = [0.0; 5];
        for (c, b) in s.iter_mut().zip(BINOM_HALF) {
            *c = b * p;
            p /= u;
        }
        Ok(self.compose(&s))
    }

    pub fn sin(&self) -> Self {
        self.compose(&sin_series(self.value()))
    }

    pub fn cos(&self) -> Self {
        self.compose(&cos_series(self.value()))
    }

    pub fn tan(&self) -> Result<Self> {
        let u = self.value();
        let s = series_div(&sin_series(u), &cos_series(u))?;
        Ok(self.compose(&s))
    }

    pub fn sinh(&self) -> Self {
        self.compose(&sinh_series(self.value()))
    }

    pub fn cosh(&self) -> Self {
        self.compose(&cosh_series(self.value()))
    }

    pub fn tanh(&self) -> Self {
        // derivatives as polynomials in t = tanh(u), which stay finite where
        // sinh and cosh overflow
        let t = self.value().tanh();
        let s = 1.0 - t * t;
        self.compose(&[
            t,
            s,
            -t * s,
            (4.0 * t * t * s - 2.0 * s * s) / 6.0,
            (16.0 * t * s * s - 8.0 * t * t * t * s) / 24.0,
        ])
    }

    pub fn atan(&self) -> Self {
        let u = self.value();
        // d/du atan(u) = 1 / (1 + u²); integrate its series term by term
        let q = [1.0 + u * u, 2.0 * u, 1.0, 0.0, 0.0];
        let inv = series_div(&[1.0, 0.0, 0.0, 0.0, 0.0], &q).expect("1 + u² > 0");
        let mut s = [u.atan(), 0.0, 0.0, 0.0, 0.0];
        for k in 1..=MAX_ORDER {
            s[k] = inv[k - 1] / k as f64;
        }
        self.compose(&s)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: i32) -> Result<Self> {
        let mut acc = Self::constant(1.0, self.order);
        for _ in 0..n.unsigned_abs() {
            acc = acc.product(self);
        }
        if n < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }

    /// `self^exponent` computed as `exp(exponent · ln self)`.
    pub fn powf(&self, exponent: &Self) -> Result<Self> {
        Ok((*exponent * self.ln()?).exp())
    }
}

type Series = [f64; MAX_ORDER + 1];

fn sin_series(u: f64) -> Series {
    let (s, c) = u.sin_cos();
    [s, c, -s / 2.0, -c / 6.0, s / 24.0]
}

fn cos_series(u: f64) -> Series {
    let (s, c) = u.sin_cos();
    [c, -s, -c / 2.0, s / 6.0, c / 24.0]
}

fn sinh_series(u: f64) -> Series {
    let (s, c) = (u.sinh(), u.cosh());
    [s, c, s / 2.0, c / 6.0, s / 24.0]
}

fn cosh_series(u: f64) -> Series {
    let (s, c) = (u.sinh(), u.cosh());
    [c, s, c / 2.0, s / 6.0, c / 24.0]
}

/// Univariate truncated power-series quotient.
fn series_div(num: &Series, den: &Series) -> Result<Series> {
    if den[0] == 0.0 {
        return Err(Error::DivisionByZero);
    }
    let mut out = [0.0; MAX_ORDER + 1];
    for k in 0..=MAX_ORDER {
        let mut acc = num[k];
        for i in 1..=k {
            acc -= den[i] * out[k - i];
        }
        out[k] = acc / den[0];
    }
    Ok(out)
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.product(&rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|c| -c)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.taylor[0] += rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.map(|c| c * rhs)
    }
}
