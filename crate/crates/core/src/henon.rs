//! Hénon maps `H(x,y) = (x² + c + ay, ax)` on the curve of parameters
//! with a fixed point of multiplier `λ_t`.
//!
//! For given `λ_t` and `a` the curve fixes
//! `c = (1−a²)x_q − x_q²` with `x_q = λ_t/2 − a²/(2λ_t)`; the fixed point
//! is `(x_q, a x_q)` and its eigenvalues are `λ_t` and `ν = −a²/λ_t`.

use std::collections::HashSet;

use num_complex::Complex64 as Cx;
use rayon::prelude::*;

use crate::error::{precondition, Error, Result};
use crate::poly1d::{PolyParams, Rotation};

/// Default escape radius, valid for every member with `|a| < 1/2`.
pub const FILTRATION_RADIUS: f64 = 3.5;

pub type Point = (Cx, Cx);

/// One Hénon map on the curve `P_{λ_t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HenonParams {
    pub rotation: Rotation,
    pub t: f64,
    pub a: Cx,
    pub lambda: Cx,
    pub c: Cx,
    /// Residual `w` in `c = c_t + a² w`.
    pub w: Cx,
    pub fixed: Point,
    /// The second eigenvalue `ν = −a²/λ_t`.
    pub nu: Cx,
    /// The one-dimensional map `p_t` this member perturbs.
    pub poly: PolyParams,
}

/// Build the member of `P_{λ_t}` with Jacobian parameter `a`.
///
/// Requires `|t| < 1/(2q)` and `|a| < 1/2`.
pub fn make_params(rotation: Rotation, t: f64, a: Cx) -> Result<HenonParams> {
    let q = rotation.q() as f64;
    if !t.is_finite() || t.abs() >= 1.0 / (2.0 * q) {
        return precondition(format!("|t| = {} must be below 1/(2q) = {}", t.abs(), 1.0 / (2.0 * q)));
    }
    if a.norm().is_nan() || a.norm() >= 0.5 {
        return precondition(format!("|a| = {} must be below 1/2", a.norm()));
    }
    let poly = PolyParams::new(rotation, t);
    let lambda = poly.lambda;
    let a2 = a * a;
    let xq = lambda / 2.0 - a2 / (lambda * 2.0);
    let c = (Cx::new(1.0, 0.0) - a2) * xq - xq * xq;
    let w = (Cx::new(-1.0, 0.0) + lambda - lambda * lambda) / (lambda * 2.0)
        + a2 / (lambda * 2.0) * (Cx::new(1.0, 0.0) - (lambda * 2.0).inv());
    Ok(HenonParams {
        rotation,
        t,
        a,
        lambda,
        c,
        w,
        fixed: (xq, a * xq),
        nu: -a2 / lambda,
        poly,
    })
}

impl HenonParams {
    /// Smallest `r` with `|x| ≥ max(|y|, r) ⇒ |x₁| ≥ |x|`:
    /// `r = (1 + |a| + √((1+|a|)² + 4|c|))/2`.
    pub fn filtration_radius(&self) -> f64 {
        let b = 1.0 + self.a.norm();
        (b + (b * b + 4.0 * self.c.norm()).sqrt()) / 2.0
    }

    pub fn q(&self) -> u32 {
        self.rotation.q()
    }

    #[inline]
    pub fn apply(&self, (x, y): Point) -> Point {
        (x * x + self.c + self.a * y, self.a * x)
    }

    pub fn apply_inverse(&self, (x, y): Point) -> Result<Point> {
        if self.a.norm() == 0.0 {
            return Err(Error::DegenerateJacobian);
        }
        let u = y / self.a;
        Ok((u, (x - u * u - self.c) / self.a))
    }

    /// `DH = [[2x, a], [a, 0]]`.
    #[inline]
    pub fn jacobian(&self, (x, _): Point) -> [[Cx; 2]; 2] {
        [[x * 2.0, self.a], [self.a, Cx::new(0.0, 0.0)]]
    }

    pub fn iterate(&self, p: Point, n: usize) -> Point {
        (0..n).fold(p, |p, _| self.apply(p))
    }
}

/// `H(x, y)`.
pub fn henon(params: &HenonParams, p: Point) -> Point {
    params.apply(p)
}

/// `H⁻¹(x, y) = (y/a, (x − p(y/a))/a)`.
pub fn henon_inv(params: &HenonParams, p: Point) -> Result<Point> {
    params.apply_inverse(p)
}

/// Outcome of the forward escape test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Escape {
    /// First `n` with `H^n(P) ∈ V⁺`.
    Escaped(u32),
    Bounded,
}

#[inline]
fn in_forward_filtration((x, y): Point, r: f64) -> bool {
    let ax = x.norm();
    ax >= r && ax >= y.norm()
}

/// Forward escape time into `V⁺ = {|x| ≥ max(|y|, r)}`.
pub fn classify_forward(params: &HenonParams, p: Point, max_iter: u32, r: f64) -> Result<Escape> {
    if r <= 3.0 {
        return precondition("filtration radius must exceed 3");
    }
    Ok(escape_time(params, p, max_iter, r))
}

fn escape_time(params: &HenonParams, mut p: Point, max_iter: u32, r: f64) -> Escape {
    for n in 0..=max_iter {
        if in_forward_filtration(p, r) {
            return Escape::Escaped(n);
        }
        if n < max_iter {
            p = params.apply(p);
        }
    }
    Escape::Bounded
}

/// A finite set of points of `C²`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Point>,
    pub meta: String,
}

impl PointCloud {
    pub fn new(points: Vec<Point>, meta: impl Into<String>) -> Self {
        Self { points, meta: meta.into() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keep the first point of each grid cell of side `cell` in `R⁴`.
    pub fn dedup(mut self, cell: f64) -> Self {
        let mut seen = HashSet::with_capacity(self.points.len());
        let key = |v: f64| (v / cell).round() as i64;
        self.points.retain(|(x, y)| seen.insert([key(x.re), key(x.im), key(y.re), key(y.im)]));
        self
    }
}

/// A square window in the `x`-plane at fixed `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub center: Cx,
    pub half_width: f64,
    pub y: Cx,
}

impl Window {
    /// Cell center of column `i`, row `j` (row 0 at the top).
    pub fn cell(&self, i: usize, j: usize, res: usize) -> Cx {
        let u = (2.0 * (i as f64 + 0.5) / res as f64) - 1.0;
        let v = 1.0 - (2.0 * (j as f64 + 0.5) / res as f64);
        self.center + Cx::new(u, v) * self.half_width
    }
}

/// Escape times on a `res × res` grid (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct EscapeGrid {
    pub window: Window,
    pub res: usize,
    pub max_iter: u32,
    pub times: Vec<Escape>,
}

impl EscapeGrid {
    pub fn get(&self, i: usize, j: usize) -> Escape {
        self.times[j * self.res + i]
    }

    pub fn escaped_fraction(&self) -> f64 {
        let n = self.times.iter().filter(|e| matches!(e, Escape::Escaped(_))).count();
        n as f64 / self.times.len() as f64
    }

    /// Bounded cells with an escaping 4-neighbour, as points `(x, y)`.
    pub fn boundary_cloud(&self) -> PointCloud {
        let res = self.res;
        let mut pts = Vec::new();
        for j in 0..res {
            for i in 0..res {
                if self.get(i, j) != Escape::Bounded {
                    continue;
                }
                let escaped = |ii: usize, jj: usize| matches!(self.get(ii, jj), Escape::Escaped(_));
                let edge = (i > 0 && escaped(i - 1, j))
                    || (i + 1 < res && escaped(i + 1, j))
                    || (j > 0 && escaped(i, j - 1))
                    || (j + 1 < res && escaped(i, j + 1));
                if edge {
                    pts.push((self.window.cell(i, j, res), self.window.y));
                }
            }
        }
        PointCloud::new(pts, format!("J+ slice y={} res={}", self.window.y, res))
    }
}

/// Escape-time picture of the slice `{y = window.y}`.
pub fn jplus_slice(params: &HenonParams, window: Window, res: usize, max_iter: u32) -> Result<EscapeGrid> {
    if res == 0 || res > 8192 {
        return precondition("slice resolution must be in 1..=8192");
    }
    let times = (0..res * res)
        .into_par_iter()
        .map(|idx| {
            let x = window.cell(idx % res, idx / res, res);
            escape_time(params, (x, window.y), max_iter, FILTRATION_RADIUS)
        })
        .collect();
    Ok(EscapeGrid { window, res, max_iter, times })
}

/// An attracting periodic orbit with the eigenvalues of its return map.
#[derive(Clone, Debug)]
pub struct Cycle {
    pub points: Vec<Point>,
    pub multipliers: [Cx; 2],
}

impl Cycle {
    pub fn distance(&self, p: Point) -> f64 {
        self.points
            .iter()
            .map(|c| dist(*c, p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Euclidean distance in `C²`.
pub fn dist(a: Point, b: Point) -> f64 {
    ((a.0 - b.0).norm_sqr() + (a.1 - b.1).norm_sqr()).sqrt()
}

fn mat_mul(m: [[Cx; 2]; 2], n: [[Cx; 2]; 2]) -> [[Cx; 2]; 2] {
    let mut out = [[Cx::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = m[i][0] * n[0][j] + m[i][1] * n[1][j];
        }
    }
    out
}

/// Eigenvalues of a 2×2 complex matrix.
pub fn eigenvalues(m: [[Cx; 2]; 2]) -> [Cx; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - det * 4.0).sqrt();
    [(tr + disc) / 2.0, (tr - disc) / 2.0]
}

/// `H^n(p)` and `D(H^n)(p)`.
fn orbit_jacobian(params: &HenonParams, mut p: Point, n: usize) -> (Point, [[Cx; 2]; 2]) {
    let one = Cx::new(1.0, 0.0);
    let zero = Cx::new(0.0, 0.0);
    let mut d = [[one, zero], [zero, one]];
    for _ in 0..n {
        d = mat_mul(params.jacobian(p), d);
        p = params.apply(p);
    }
    (p, d)
}

/// Locate an attracting cycle of period `period` by forward iteration from
/// `seed` followed by Newton on `H^period(P) − P`.
///
/// Used only for `t ≠ 0`: at `t = 0` the fixed point is degenerate and the
/// nearby cycle has merged with it.
pub fn attracting_cycle(params: &HenonParams, seed: Point, period: usize) -> Result<Cycle> {
    if period == 0 {
        return precondition("cycle period must be positive");
    }
    let mut p = seed;
    for _ in 0..20_000 {
        let next = params.iterate(p, period);
        if !next.0.norm().is_finite() || next.0.norm() > 1e6 {
            return Err(Error::Numerical("orbit escaped while locating cycle".into()));
        }
        let step = dist(next, p);
        p = next;
        if step < 1e-10 {
            break;
        }
    }
    for _ in 0..50 {
        let (image, d) = orbit_jacobian(params, p, period);
        let f = (image.0 - p.0, image.1 - p.1);
        let m = [[d[0][0] - 1.0, d[0][1]], [d[1][0], d[1][1] - 1.0]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.norm() < 1e-300 {
            return Err(Error::Numerical("singular Newton step for cycle".into()));
        }
        let dx = (m[1][1] * f.0 - m[0][1] * f.1) / det;
        let dy = (m[0][0] * f.1 - m[1][0] * f.0) / det;
        p = (p.0 - dx, p.1 - dy);
        if (dx.norm() + dy.norm()) < 1e-15 * (1.0 + p.0.norm()) {
            break;
        }
    }
    let (image, d) = orbit_jacobian(params, p, period);
    if dist(image, p) > 1e-10 {
        return Err(Error::Numerical("cycle Newton did not converge".into()));
    }
    let multipliers = eigenvalues(d);
    if multipliers.iter().any(|m| m.norm() >= 1.0) {
        return Err(Error::Numerical("located cycle is not attracting".into()));
    }
    let mut points = vec![p];
    for _ in 1..period {
        points.push(params.apply(*points.last().expect("non-empty")));
    }
    Ok(Cycle { points, multipliers })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u32, q: u32, t: f64, a: f64) -> HenonParams {
        make_params(Rotation::new(p, q).unwrap(), t, Cx::new(a, 0.0)).unwrap()
    }

    #[test]
    fn examples() {
        let h = params(1, 1, 0.0, 0.0);
        assert!((h.c - Cx::new(0.25, 0.0)).norm() < 1e-15);
        assert!((h.fixed.0 - Cx::new(0.5, 0.0)).norm() < 1e-15 && h.fixed.1.norm() == 0.0);
        assert_eq!(h.nu.norm(), 0.0);

        let h = params(1, 2, 0.0, 0.0);
        assert!((h.c - Cx::new(-0.75, 0.0)).norm() < 1e-15);
        assert!((h.poly.alpha - Cx::new(-0.5, 0.0)).norm() < 1e-15);

        let h = params(1, 1, 0.0, 0.1);
        let ev = eigenvalues(h.jacobian(h.fixed));
        let mut ev = [ev[0].re, ev[1].re];
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 0.01).abs() < 1e-10 && (ev[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ranges_are_enforced() {
        let r = Rotation::new(1, 2).unwrap();
        assert!(make_params(r, 0.25, Cx::new(0.1, 0.0)).is_err());
        assert!(make_params(r, 0.1, Cx::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn inverse_round_trip_and_degenerate_case() {
        let h = params(1, 1, 0.0, 0.1);
        let p = (Cx::new(0.3, 0.0), Cx::new(-0.2, 0.0));
        let back = henon_inv(&h, henon(&h, p)).unwrap();
        assert!(dist(back, p) < 1e-13);
        let h0 = params(1, 1, 0.0, 0.0);
        assert_eq!(henon_inv(&h0, p).unwrap_err(), Error::DegenerateJacobian);
        let img = henon(&h0, p);
        assert_eq!(img, (h0.poly.eval(p.0), Cx::new(0.0, 0.0)));
    }

    #[test]
    fn forward_classification() {
        let h = params(1, 1, 0.0, 0.1);
        let far = (Cx::new(10.0, 0.0), Cx::new(0.0, 0.0));
        assert_eq!(classify_forward(&h, far, 100, 3.5).unwrap(), Escape::Escaped(0));
        assert_eq!(classify_forward(&h, h.fixed, 500, 3.5).unwrap(), Escape::Bounded);
        assert!(classify_forward(&h, far, 10, 2.0).is_err());
    }

    #[test]
    fn dedup_keeps_first_in_cell() {
        let z = Cx::new(0.0, 0.0);
        let cloud = PointCloud::new(
            vec![(Cx::new(0.1, 0.0), z), (Cx::new(0.1 + 1e-9, 0.0), z), (Cx::new(0.2, 0.0), z)],
            "t",
        );
        assert_eq!(cloud.dedup(1e-6).len(), 2);
    }
}
