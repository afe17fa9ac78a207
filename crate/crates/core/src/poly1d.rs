//! The quadratic family `p_t(x) = x² + c_t` with `c_t = λ_t/2 − λ_t²/4`.
//!
//! `α_t = λ_t/2` is a fixed point of `p_t` with multiplier
//! `λ_t = (1+t)e^{2πip/q}`; at `t = 0` it is parabolic.
//!
//! Equipotentials are sampled on a dyadic grid `s = k/N` and pulled back by
//! `p_t^{-1}(γ_{n−1}(2s)) = γ_n(s)`. Because the grid is dyadic the
//! doubled angle `2k/N` is again a grid point, so the only choice made by
//! the pullback is the branch of the square root, fixed by continuity in
//! `s` starting from the root of larger real part at `s = 0`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as Cx;
use rayon::prelude::*;

use crate::error::{precondition, Error, Result};
use crate::series::TruncSeries1;

/// Base equipotential level `R`; the seed loop sits at level `log √R`.
pub const BASE_LEVEL: f64 = 4.0;
/// Escape radius used by [`green`].
pub const ESCAPE_RADIUS: f64 = 10.0;
/// Default radius of the local sectors in normalized coordinates.
pub const SECTOR_RADIUS: f64 = 0.15;

/// Rotation number `p/q` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rotation {
    p: u32,
    q: u32,
}

impl Rotation {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if q == 0 {
            return precondition("rotation denominator must be positive");
        }
        if p > q || gcd(p, q) != 1 {
            return precondition(format!("rotation {p}/{q} is not in lowest terms in [0,1]"));
        }
        Ok(Self { p, q })
    }

    /// Parse `"p/q"`.
    pub fn parse(text: &str) -> Result<Self> {
        let (p, q) = text
            .split_once('/')
            .ok_or_else(|| Error::Precondition(format!("rotation '{text}' is not of the form p/q")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::Precondition(format!("rotation '{text}' is not of the form p/q")))
        };
        Self::new(parse(p)?, parse(q)?)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `e^{2πip/q}`, exact on the axes.
    pub fn root_of_unity(&self) -> Cx {
        let turns = (self.p % self.q) as f64 / self.q as f64;
        if (4.0 * turns).fract() != 0.0 {
            return Cx::from_polar(1.0, 2.0 * PI * turns);
        }
        match (4.0 * turns) as u32 {
            0 => Cx::new(1.0, 0.0),
            1 => Cx::new(0.0, 1.0),
            2 => Cx::new(-1.0, 0.0),
            _ => Cx::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One member `p_t` of the family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyParams {
    pub rotation: Rotation,
    pub t: f64,
    /// Multiplier `λ_t = (1+t)e^{2πip/q}`.
    pub lambda: Cx,
    /// `c_t = λ_t/2 − λ_t²/4`.
    pub c: Cx,
    /// Fixed point `α_t = λ_t/2`.
    pub alpha: Cx,
}

impl PolyParams {
    pub fn new(rotation: Rotation, t: f64) -> Self {
        let lambda = rotation.root_of_unity() * (1.0 + t);
        Self { rotation, t, lambda, c: lambda / 2.0 - lambda * lambda / 4.0, alpha: lambda / 2.0 }
    }

    pub fn q(&self) -> u32 {
        self.rotation.q()
    }

    #[inline]
    pub fn eval(&self, z: Cx) -> Cx {
        z * z + self.c
    }

    #[inline]
    pub fn deriv(&self, z: Cx) -> Cx {
        z * 2.0
    }

    /// The fixed point translated to the origin: `x ↦ λ_t x + x²`.
    pub fn recentered(&self, order: usize) -> TruncSeries1 {
        TruncSeries1::with_order(order, &[Cx::new(0.0, 0.0), self.lambda, Cx::new(1.0, 0.0)])
    }
}

/// Green function `G(z) = lim 2^{−n} log|p^n(z)|`, or 0 when `z` does not
/// leave the disk of radius [`ESCAPE_RADIUS`] within `iters` steps.
///
/// Once the orbit leaves the escape disk it is followed a few more steps
/// (until `|z| > 1e12`) before taking the logarithm, which removes most of
/// the `O(|c|/|z|²)` bias of the first escaping iterate.
pub fn green(params: &PolyParams, z: Cx, iters: usize) -> f64 {
    let mut z = z;
    for n in 0..=iters {
        if z.norm() > ESCAPE_RADIUS {
            let mut m = n as i32;
            while z.norm() <= 1e12 {
                z = params.eval(z);
                m += 1;
            }
            return z.norm().ln() * 2f64.powi(-m);
        }
        if n < iters {
            z = params.eval(z);
        }
    }
    0.0
}

/// A closed curve sampled at `s = k/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopSample {
    pub values: Vec<Cx>,
    /// Green level of the curve (`log R / 2^{n+1}` for `γ_{t,n}`).
    pub level: f64,
}

impl LoopSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sample at index `k`, read cyclically.
    pub fn at(&self, k: usize) -> Cx {
        self.values[k % self.values.len()]
    }

    /// Sample nearest to angle `s` on the grid.
    pub fn at_angle(&self, s: f64) -> Cx {
        let n = self.values.len();
        let k = (s.rem_euclid(1.0) * n as f64).round() as usize % n;
        self.values[k]
    }

    /// `sup_k |self_k − other_k|`.
    pub fn sup_distance(&self, other: &LoopSample) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Circle of radius `radius` centered at 0, at the given level.
    pub fn circle(n: usize, radius: f64, level: f64) -> Self {
        let values = (0..n)
            .map(|k| Cx::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
            .collect();
        Self { values, level }
    }
}

/// Given one square root `r_k` of each target, choose `±r_k` so that the
/// result is continuous in `k`, starting at `k = 0` from the root with the
/// larger real part. Each sign is the one closer to the linear
/// extrapolation of the two previous samples.
pub(crate) fn stitch_roots(roots: &[Cx]) -> Result<Vec<Cx>> {
    let mut out = Vec::with_capacity(roots.len());
    let Some(&first) = roots.first() else {
        return Ok(out);
    };
    let first = if first.re > 0.0 || (first.re == 0.0 && first.im >= 0.0) { first } else { -first };
    out.push(first);
    for &r in &roots[1..] {
        if !r.re.is_finite() || !r.im.is_finite() {
            return Err(Error::Numerical("non-finite preimage".into()));
        }
        let k = out.len();
        let prev = out[k - 1];
        // Linear extrapolation follows transversal crossings of the two
        // branches; a miss comparable to the step means the grid is too coarse.
        let (guess, step) = if k >= 2 { (prev * 2.0 - out[k - 2], (prev - out[k - 2]).norm()) } else { (prev, 0.0) };
        let (d_plus, d_minus) = ((r - guess).norm(), (-r - guess).norm());
        let miss = d_plus.min(d_minus);
        if 2.0 * r.norm() < miss && miss > 0.25 * step {
            return Err(Error::ResolutionTooCoarse);
        }
        out.push(if d_plus <= d_minus { r } else { -r });
    }
    let (first, last) = (out[0], out[out.len() - 1]);
    if out.len() > 1 && (last - first).norm() > (last + first).norm() {
        return Err(Error::ResolutionTooCoarse);
    }
    Ok(out)
}

fn check_grid(n: usize, q: u32) -> Result<()> {
    if !n.is_power_of_two() {
        return precondition(format!("loop length {n} is not a power of two"));
    }
    if n < 2 * q as usize {
        return precondition(format!("loop length {n} is below 2q = {}", 2 * q));
    }
    Ok(())
}

/// One pullback step: `out[k]` solves `p_t(out[k]) = loop[2k mod N]`.
pub fn pullback_loop(params: &PolyParams, curve: &LoopSample) -> Result<LoopSample> {
    if curve.level <= 0.0 {
        return precondition("pullback needs a loop at positive Green level");
    }
    let n = curve.len();
    check_grid(n, params.q())?;
    let roots: Vec<Cx> = (0..n)
        .into_par_iter()
        .map(|k| (curve.values[(2 * k) % n] - params.c).sqrt())
        .collect();
    Ok(LoopSample { values: stitch_roots(&roots)?, level: curve.level / 2.0 })
}

/// The seed equipotential `γ_{t,0}(s) = Ψ(R^{1/2} e^{2πis})` for `R = 4`.
///
/// Built by pulling back the curve `w − c/(2w)` on `|w| = R^8`, where the
/// inverse Böttcher map agrees with that expression to `O(|w|^{-3})`.
pub fn base_loop(params: &PolyParams, n: usize) -> Result<LoopSample> {
    check_grid(n, params.q())?;
    let radius = BASE_LEVEL.powi(8);
    let mut curve = LoopSample::circle(n, radius, radius.ln());
    for v in curve.values.iter_mut() {
        *v -= params.c / (*v * 2.0);
    }
    for _ in 0..4 {
        curve = pullback_loop(params, &curve)?;
    }
    Ok(curve)
}

/// Result of [`caratheodory`]: the loop `γ_{t,n}` and the Cauchy gaps
/// `sup_k |γ_{t,m} − γ_{t,m−1}|` for `m = 1..=n`.
#[derive(Clone, Debug)]
pub struct Caratheodory {
    pub curve: LoopSample,
    pub gaps: Vec<f64>,
}

impl Caratheodory {
    pub fn final_gap(&self) -> f64 {
        self.gaps.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// `n_iters` pullbacks of the seed equipotential on an `N`-point grid.
pub fn caratheodory(params: &PolyParams, n: usize, n_iters: usize) -> Result<Caratheodory> {
    if n < 1024 || !n.is_power_of_two() {
        return precondition(format!("caratheodory needs N a power of two ≥ 1024, got {n}"));
    }
    if n_iters == 0 {
        return precondition("caratheodory needs n_iters ≥ 1");
    }
    let mut curve = base_loop(params, n)?;
    let mut gaps = Vec::with_capacity(n_iters);
    for _ in 0..n_iters {
        let next = pullback_loop(params, &curve)?;
        gaps.push(next.sup_distance(&curve));
        curve = next;
    }
    Ok(Caratheodory { curve, gaps })
}

/// The 1-D normal form at `α_t`.
///
/// With `u = z − α_t`, `normal = change ∘ f ∘ change⁻¹` where
/// `f(u) = λ_t u + u²`, and `normal(x) = λ_t(x + x^{q+1} + C x^{2q+1} + …)`.
#[derive(Clone, Debug)]
pub struct NormalForm1D {
    pub change: TruncSeries1,
    pub normal: TruncSeries1,
    /// The coefficient `C_t`.
    pub c_coef: Cx,
    /// Rescaling constant `A` with `A^q` equal to the normalized
    /// `x^{q+1}` coefficient before rescaling.
    pub scale: Cx,
}

/// Conjugate `f` by `g`: returns `g ∘ f ∘ g⁻¹`.
fn conjugate(f: &TruncSeries1, g: &TruncSeries1) -> Result<TruncSeries1> {
    g.compose(&f.compose(&g.invert()?)?)
}

/// Reduce `λ_t u + u²` to `λ_t(x + x^{q+1} + C x^{2q+1} + O(x^{2q+2}))`.
///
/// Monomials `x^k`, `2 ≤ k ≤ 2q+1`, `k ≢ 1 mod q`, are removed by
/// `X = x + b x^k` with `b = a_k/(λ_t − λ_t^k)`; the `x^{q+1}` coefficient
/// is normalized by `X = A x` with `A` the principal `q`-th root.
pub fn normal_form_1d(params: &PolyParams, order: usize) -> Result<NormalForm1D> {
    let q = params.q() as usize;
    if order < 2 * q + 2 {
        return precondition(format!("normal form needs order ≥ 2q+2 = {}", 2 * q + 2));
    }
    let lambda = params.lambda;
    let mut f = params.recentered(order);
    let mut change = TruncSeries1::identity(order);
    let mut scale = Cx::new(1.0, 0.0);
    for k in 2..=2 * q + 1 {
        let g = if k == q + 1 {
            let a = f[q + 1] / lambda;
            if a.norm() < 1e-300 {
                return Err(Error::Numerical("vanishing x^{q+1} coefficient".into()));
            }
            scale = a.powf(1.0 / q as f64);
            TruncSeries1::monomial(order, 1, scale)
        } else if (k - 1) % q != 0 {
            let gap = lambda - lambda.powu(k as u32);
            if gap.norm() < 1e-8 {
                return Err(Error::ResonanceTooClose);
            }
            let b = f[k] / gap;
            &TruncSeries1::identity(order) + &TruncSeries1::monomial(order, k, b)
        } else {
            continue;
        };
        f = conjugate(&f, &g)?;
        change = g.compose(&change)?;
    }
    Ok(NormalForm1D { c_coef: f[2 * q + 1] / lambda, change, normal: f, scale })
}

/// Which local region a point of normalized coordinates lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    /// `Δ⁺`: the closure of the attracting directions (and, for `t < 0`,
    /// the disk `|x^q| ≤ R_t` absorbed by the fixed point).
    Attracting,
    /// `Δ⁻`: `Re(x^q) > ε0 |Im(x^q)|`.
    Repelling,
    /// Beyond the sector radius.
    Outside,
}

/// `ε0 = tan(2π/9)`.
pub fn eps0() -> f64 {
    (2.0 * PI / 9.0).tan()
}

/// `ε1 = ε0/√(1+ε0²) = sin(2π/9)`.
pub fn eps1() -> f64 {
    let e = eps0();
    e / (1.0 + e * e).sqrt()
}

/// `ε2 = 1/(16(q+1))`.
pub fn eps2(q: u32) -> f64 {
    1.0 / (16.0 * (q as f64 + 1.0))
}

/// Inner radius `R_t = |t|/((q + 1/3) ε1)` of the repelling annulus for
/// `t < 0` (measured on `x^q`).
pub fn inner_radius(q: u32, t: f64) -> f64 {
    t.abs() / ((q as f64 + 1.0 / 3.0) * eps1())
}

/// True when `w = x^q` lies in the open repelling cone `Re w > ε0 |Im w|`.
pub fn in_repelling_cone(w: Cx) -> bool {
    w.re > eps0() * w.im.abs()
}

/// Classify a normalized coordinate with the default sector radius.
pub fn sector_1d(params: &PolyParams, x: Cx) -> Sector {
    sector_1d_with_radius(params, x, SECTOR_RADIUS)
}

/// Classify a normalized coordinate inside `|x| ≤ rho`.
pub fn sector_1d_with_radius(params: &PolyParams, x: Cx, rho: f64) -> Sector {
    if x.norm() > rho {
        return Sector::Outside;
    }
    let w = x.powu(params.q());
    if params.t < 0.0 && w.norm() <= inner_radius(params.q(), params.t) {
        return Sector::Attracting;
    }
    if in_repelling_cone(w) {
        Sector::Repelling
    } else {
        Sector::Attracting
    }
}
