//! Truncated power series in one and two complex variables.
//!
//! [`TruncSeries1`] stores `c_0 + c_1 x + … + c_D x^D`; [`TruncSeries2`]
//! stores `Σ c_ij x^i y^j` over the triangle `i + j ≤ D` (total-degree
//! truncation). Binary operations between series of different orders
//! truncate to the smaller order, so every result is exact modulo the
//! terms it does not carry.
//!
//! [`SeriesMap2`] is a pair of two-variable series read as a map germ
//! `(x, y) ↦ (f(x, y), g(x, y))`, with composition and inversion.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};

const ZERO: Cx = Cx::new(0.0, 0.0);
const ONE: Cx = Cx::new(1.0, 0.0);

/// Truncated power series `Σ_{k ≤ D} c_k x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries1 {
    coeffs: Vec<Cx>,
}

impl TruncSeries1 {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![ZERO; order + 1] }
    }

    /// Series with the given coefficients; order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<Cx>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { coeffs }
    }

    /// Series of the given order from a possibly shorter or longer list:
    /// missing coefficients are zero, extra ones are dropped.
    pub fn with_order(order: usize, coeffs: &[Cx]) -> Self {
        let mut s = Self::zero(order);
        for (dst, src) in s.coeffs.iter_mut().zip(coeffs) {
            *dst = *src;
        }
        s
    }

    pub fn from_real(order: usize, coeffs: &[f64]) -> Self {
        let c: Vec<Cx> = coeffs.iter().map(|&v| Cx::new(v, 0.0)).collect();
        Self::with_order(order, &c)
    }

    pub fn constant(order: usize, c: Cx) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `x`.
    pub fn identity(order: usize) -> Self {
        Self::monomial(order, 1, ONE)
    }

    /// `c x^k`, or zero when `k` exceeds the order.
    pub fn monomial(order: usize, k: usize, c: Cx) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn get(&self, k: usize) -> Option<Cx> {
        self.coeffs.get(k).copied()
    }

    pub fn set(&mut self, k: usize, value: Cx) -> Result<()> {
        let order = self.order();
        let slot = self
            .coeffs
            .get_mut(k)
            .ok_or(Error::IndexOutOfRange(k, 0, order))?;
        *slot = value;
        Ok(())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::with_order(order, &self.coeffs)
    }

    pub fn scale(&self, c: Cx) -> Self {
        Self { coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.order(), ONE);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluate the polynomial part at `x` (Horner).
    pub fn eval(&self, x: Cx) -> Cx {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * x + c)
    }

    /// Derivative, of order `D - 1` (order 0 stays 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        let c = (1..=self.order())
            .map(|k| self.coeffs[k] * k as f64)
            .collect();
        Self { coeffs: c }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `self ∘ inner`, truncated at the common order.
    pub fn compose(&self, inner: &TruncSeries1) -> Result<TruncSeries1> {
        if self.order() != inner.order() {
            return Err(Error::OrderMismatch(self.order(), inner.order()));
        }
        if inner.coeffs[0] != ZERO {
            return Err(Error::CompositionOffOrigin);
        }
        let order = self.order();
        let mut acc = Self::zero(order);
        for c in self.coeffs.iter().rev() {
            acc = &acc * inner;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Compositional inverse `g` with `self ∘ g = x` through the order.
    pub fn invert(&self) -> Result<TruncSeries1> {
        if self.coeffs[0] != ZERO {
            return Err(Error::CompositionOffOrigin);
        }
        let order = self.order();
        let lin = self.coeffs.get(1).copied().unwrap_or(ZERO);
        if lin.norm() == 0.0 || order == 0 {
            return Err(Error::NonInvertibleJet);
        }
        let mut nonlinear = self.clone();
        nonlinear.coeffs[1] = ZERO;
        let x = Self::identity(order);
        let inv_lin = lin.inv();
        // g ← (x − N∘g)/f′(0) gains one correct order per pass.
        let mut g = x.scale(inv_lin);
        for _ in 1..order {
            g = (&x - &nonlinear.compose(&g)?).scale(inv_lin);
        }
        Ok(g)
    }
}

impl Index<usize> for TruncSeries1 {
    type Output = Cx;
    fn index(&self, k: usize) -> &Cx {
        &self.coeffs[k]
    }
}

impl Add for &TruncSeries1 {
    type Output = TruncSeries1;
    fn add(self, rhs: &TruncSeries1) -> TruncSeries1 {
        let order = self.order().min(rhs.order());
        let c = (0..=order).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect();
        TruncSeries1 { coeffs: c }
    }
}

impl Sub for &TruncSeries1 {
    type Output = TruncSeries1;
    fn sub(self, rhs: &TruncSeries1) -> TruncSeries1 {
        let order = self.order().min(rhs.order());
        let c = (0..=order).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect();
        TruncSeries1 { coeffs: c }
    }
}

impl Neg for &TruncSeries1 {
    type Output = TruncSeries1;
    fn neg(self) -> TruncSeries1 {
        self.scale(-ONE)
    }
}

impl Mul for &TruncSeries1 {
    type Output = TruncSeries1;
    fn mul(self, rhs: &TruncSeries1) -> TruncSeries1 {
        let order = self.order().min(rhs.order());
        let mut out = vec![ZERO; order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncSeries1 { coeffs: out }
    }
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

/// Truncated series `Σ_{i+j ≤ D} c_ij x^i y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries2 {
    order: usize,
    coeffs: Vec<Cx>,
}

impl TruncSeries2 {
    pub fn zero(order: usize) -> Self {
        Self { order, coeffs: vec![ZERO; tri_index(0, order) + 1] }
    }

    pub fn constant(order: usize, c: Cx) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        Self::monomial(order, 1, 0, ONE)
    }

    /// The series `y`.
    pub fn y(order: usize) -> Self {
        Self::monomial(order, 0, 1, ONE)
    }

    /// `c x^i y^j`, or zero when `i + j` exceeds the order.
    pub fn monomial(order: usize, i: usize, j: usize, c: Cx) -> Self {
        let mut s = Self::zero(order);
        if i + j <= order {
            s.coeffs[tri_index(i, j)] = c;
        }
        s
    }

    /// Embed a one-variable series `f` as `f(x)`.
    pub fn from_x_series(order: usize, f: &TruncSeries1) -> Self {
        let mut s = Self::zero(order);
        for i in 0..=order.min(f.order()) {
            s.coeffs[tri_index(i, 0)] = f[i];
        }
        s
    }

    /// Embed a one-variable series `f` as `f(y)`.
    pub fn from_y_series(order: usize, f: &TruncSeries1) -> Self {
        let mut s = Self::zero(order);
        for j in 0..=order.min(f.order()) {
            s.coeffs[tri_index(0, j)] = f[j];
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Result<Cx> {
        if i + j > self.order {
            return Err(Error::IndexOutOfRange(i, j, self.order));
        }
        Ok(self.coeffs[tri_index(i, j)])
    }

    pub fn set(&mut self, i: usize, j: usize, value: Cx) -> Result<()> {
        if i + j > self.order {
            return Err(Error::IndexOutOfRange(i, j, self.order));
        }
        self.coeffs[tri_index(i, j)] = value;
        Ok(())
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> Cx {
        self.coeffs[tri_index(i, j)]
    }

    #[inline]
    pub(crate) fn at_mut(&mut self, i: usize, j: usize) -> &mut Cx {
        &mut self.coeffs[tri_index(i, j)]
    }

    /// All `(i, j, c_ij)` in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Cx)> + '_ {
        (0..=self.order).flat_map(move |n| (0..=n).map(move |j| (n - j, j, self.at(n - j, j))))
    }

    /// The coefficient of `x^k` as a series in `y` (order `D - k`).
    pub fn x_coefficient(&self, k: usize) -> Result<TruncSeries1> {
        if k > self.order {
            return Err(Error::IndexOutOfRange(k, 0, self.order));
        }
        let c = (0..=self.order - k).map(|j| self.at(k, j)).collect();
        Ok(TruncSeries1::new(c))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut s = Self::zero(order);
        for n in 0..=order.min(self.order) {
            for j in 0..=n {
                *s.at_mut(n - j, j) = self.at(n - j, j);
            }
        }
        s
    }

    pub fn scale(&self, c: Cx) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.order, ONE);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn constant_term(&self) -> Cx {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: Cx, y: Cx) -> Cx {
        let mut xp = Vec::with_capacity(self.order + 1);
        let mut yp = Vec::with_capacity(self.order + 1);
        let (mut a, mut b) = (ONE, ONE);
        for _ in 0..=self.order {
            xp.push(a);
            yp.push(b);
            a *= x;
            b *= y;
        }
        self.terms().map(|(i, j, c)| c * xp[i] * yp[j]).sum()
    }

    /// `∂/∂x`, of order `D - 1`.
    pub fn dx(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut s = Self::zero(order);
        if self.order == 0 {
            return s;
        }
        for n in 0..=order {
            for j in 0..=n {
                let i = n - j;
                *s.at_mut(i, j) = self.at(i + 1, j) * (i + 1) as f64;
            }
        }
        s
    }

    /// `∂/∂y`, of order `D - 1`.
    pub fn dy(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut s = Self::zero(order);
        if self.order == 0 {
            return s;
        }
        for n in 0..=order {
            for j in 0..=n {
                let i = n - j;
                *s.at_mut(i, j) = self.at(i, j + 1) * (j + 1) as f64;
            }
        }
        s
    }

    /// `(∂/∂x, ∂/∂y)` evaluated at a point.
    pub fn gradient(&self, x: Cx, y: Cx) -> (Cx, Cx) {
        let mut gx = ZERO;
        let mut gy = ZERO;
        for (i, j, c) in self.terms() {
            if c == ZERO {
                continue;
            }
            if i > 0 {
                gx += c * (i as f64) * x.powu(i as u32 - 1) * y.powu(j as u32);
            }
            if j > 0 {
                gy += c * (j as f64) * x.powu(i as u32) * y.powu(j as u32 - 1);
            }
        }
        (gx, gy)
    }
}

impl Add for &TruncSeries2 {
    type Output = TruncSeries2;
    fn add(self, rhs: &TruncSeries2) -> TruncSeries2 {
        let order = self.order.min(rhs.order);
        let mut s = self.truncate(order);
        for n in 0..=order {
            for j in 0..=n {
                *s.at_mut(n - j, j) += rhs.at(n - j, j);
            }
        }
        s
    }
}

impl Sub for &TruncSeries2 {
    type Output = TruncSeries2;
    fn sub(self, rhs: &TruncSeries2) -> TruncSeries2 {
        let order = self.order.min(rhs.order);
        let mut s = self.truncate(order);
        for n in 0..=order {
            for j in 0..=n {
                *s.at_mut(n - j, j) -= rhs.at(n - j, j);
            }
        }
        s
    }
}

impl Neg for &TruncSeries2 {
    type Output = TruncSeries2;
    fn neg(self) -> TruncSeries2 {
        self.scale(-ONE)
    }
}

impl Mul for &TruncSeries2 {
    type Output = TruncSeries2;
    fn mul(self, rhs: &TruncSeries2) -> TruncSeries2 {
        let order = self.order.min(rhs.order);
        let mut out = TruncSeries2::zero(order);
        for n1 in 0..=order {
            for j1 in 0..=n1 {
                let i1 = n1 - j1;
                let a = self.at(i1, j1);
                if a == ZERO {
                    continue;
                }
                for n2 in 0..=order - n1 {
                    for j2 in 0..=n2 {
                        let i2 = n2 - j2;
                        *out.at_mut(i1 + i2, j1 + j2) += a * rhs.at(i2, j2);
                    }
                }
            }
        }
        out
    }
}

/// A map germ `(x, y) ↦ (x_series, y_series)` fixing the origin or not.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMap2 {
    pub x: TruncSeries2,
    pub y: TruncSeries2,
}

impl SeriesMap2 {
    pub fn new(x: TruncSeries2, y: TruncSeries2) -> Self {
        Self { x, y }
    }

    pub fn identity(order: usize) -> Self {
        Self { x: TruncSeries2::x(order), y: TruncSeries2::y(order) }
    }

    pub fn order(&self) -> usize {
        self.x.order().min(self.y.order())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { x: self.x.truncate(order), y: self.y.truncate(order) }
    }

    pub fn eval(&self, p: (Cx, Cx)) -> (Cx, Cx) {
        (self.x.eval(p.0, p.1), self.y.eval(p.0, p.1))
    }

    /// Jacobian `[[∂x f, ∂y f], [∂x g, ∂y g]]` at a point.
    pub fn jacobian(&self, p: (Cx, Cx)) -> [[Cx; 2]; 2] {
        let (fx, fy) = self.x.gradient(p.0, p.1);
        let (gx, gy) = self.y.gradient(p.0, p.1);
        [[fx, fy], [gx, gy]]
    }

    /// Linear part at the origin as a matrix.
    pub fn linear_part(&self) -> [[Cx; 2]; 2] {
        [[self.x.at(1, 0), self.x.at(0, 1)], [self.y.at(1, 0), self.y.at(0, 1)]]
    }

    /// `self ∘ inner`, truncated at the common order.
    pub fn compose(&self, inner: &SeriesMap2) -> Result<SeriesMap2> {
        if self.order() != inner.order() {
            return Err(Error::OrderMismatch(self.order(), inner.order()));
        }
        if inner.x.constant_term() != ZERO || inner.y.constant_term() != ZERO {
            return Err(Error::CompositionOffOrigin);
        }
        Ok(Self {
            x: substitute(&self.x, &inner.x, &inner.y),
            y: substitute(&self.y, &inner.x, &inner.y),
        })
    }

    /// Compositional inverse of a germ fixing the origin with invertible
    /// linear part.
    pub fn invert(&self) -> Result<SeriesMap2> {
        if self.x.constant_term() != ZERO || self.y.constant_term() != ZERO {
            return Err(Error::CompositionOffOrigin);
        }
        let order = self.order();
        let [[a, b], [c, d]] = self.linear_part();
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(Error::NonInvertibleJet);
        }
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let apply_inv = |u: &TruncSeries2, v: &TruncSeries2| {
            Self::new(
                &u.scale(inv[0][0]) + &v.scale(inv[0][1]),
                &u.scale(inv[1][0]) + &v.scale(inv[1][1]),
            )
        };
        let mut nonlinear = self.truncate(order);
        *nonlinear.x.at_mut(1, 0) = ZERO;
        *nonlinear.x.at_mut(0, 1) = ZERO;
        *nonlinear.y.at_mut(1, 0) = ZERO;
        *nonlinear.y.at_mut(0, 1) = ZERO;
        let id = Self::identity(order);
        let mut g = apply_inv(&id.x, &id.y);
        for _ in 1..order {
            let ng = nonlinear.compose(&g)?;
            g = apply_inv(&(&id.x - &ng.x), &(&id.y - &ng.y));
        }
        Ok(g)
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn distance(&self, other: &SeriesMap2) -> f64 {
        (&self.x - &other.x).max_abs().max((&self.y - &other.y).max_abs())
    }
}

/// `f(u, v)` for series `u`, `v` without constant terms.
fn substitute(f: &TruncSeries2, u: &TruncSeries2, v: &TruncSeries2) -> TruncSeries2 {
    let order = f.order().min(u.order()).min(v.order());
    let mut upow = vec![TruncSeries2::constant(order, ONE)];
    let mut vpow = vec![TruncSeries2::constant(order, ONE)];
    for k in 1..=order {
        upow.push(&upow[k - 1] * u);
        vpow.push(&vpow[k - 1] * v);
    }
    let mut out = TruncSeries2::zero(order);
    for (i, j, c) in f.truncate(order).terms() {
        if c == ZERO {
            continue;
        }
        let term = if i == 0 {
            vpow[j].clone()
        } else if j == 0 {
            upow[i].clone()
        } else {
            &upow[i] * &vpow[j]
        };
        for n in 0..=order {
            for jj in 0..=n {
                *out.at_mut(n - jj, jj) += c * term.at(n - jj, jj);
            }
        }
    }
    out
}
