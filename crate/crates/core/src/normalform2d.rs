//! Normal form of a Hénon map at its semi-parabolic (or nearby) fixed
//! point, computed as a jet of total degree `D`.
//!
//! Starting from `H` in coordinates centered at the fixed point, the
//! reduction runs these stages, each a polynomial change of coordinates:
//!
//! 1. straighten the strong stable manifold `x = w(y)` to `{x = 0}` and
//!    linearize the dynamics on it, so the first component vanishes on
//!    `x = 0` and the second restricts to `y ↦ νy`;
//! 2. shear `y ↦ y + κx` to remove the linear `x` term of the second
//!    component;
//! 3. `X = u(y)x` with `u(Y) = ∏ b₁(νⁿY)` makes the linear coefficient the
//!    constant `λ_t`;
//! 4. `X = x + v(y)x^k` with `λ_t v(Y) = Σ (a_k(νⁿY) − a_k(0)) λ_t^{n(k−1)}`
//!    makes the `x^k` coefficients constant for `k ≤ 2q+1`;
//! 5. the one-dimensional eliminations `X = x + b x^k`,
//!    `b = a_k/(λ_t − λ_t^k)`, and the rescaling `X = A x`.
//!
//! The result is `(λ_t(x + x^{q+1} + C x^{2q+1} + …), νy + x h(x,y))` with
//! `h(0,0) = 0`.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{precondition, Error, Result};
use crate::henon::{attracting_cycle, dist, HenonParams, Point};
use crate::poly1d::{inner_radius, SECTOR_RADIUS};
use crate::series::{SeriesMap2, TruncSeries1, TruncSeries2};

const ZERO: Cx = Cx::new(0.0, 0.0);
const ONE: Cx = Cx::new(1.0, 0.0);

/// Default height of the local bidisk used by the petal checks.
pub const LOCAL_HEIGHT: f64 = 0.1;

/// The normal form jet at the fixed point.
#[derive(Clone, Debug)]
pub struct NormalForm2D {
    /// Centered coordinates → normalized coordinates.
    pub change: SeriesMap2,
    /// Normalized coordinates → centered coordinates.
    pub inverse: SeriesMap2,
    /// `change ∘ H ∘ change⁻¹`.
    pub normal: SeriesMap2,
    /// The coefficient `C` of `x^{2q+1}` divided by `λ_t`.
    pub c_coef: Cx,
    /// Strong stable manifold as a graph `x = w(y)` in centered coordinates.
    pub wss: TruncSeries1,
    /// Rescaling constant `A` (principal `q`-th root).
    pub scale: Cx,
    /// The straightening stage `(x − w(y), ψ(y))` alone.
    pub straightening: SeriesMap2,
}

impl NormalForm2D {
    pub fn order(&self) -> usize {
        self.normal.order()
    }

    /// Original coordinates → normalized coordinates.
    pub fn to_normal(&self, params: &HenonParams, p: Point) -> Point {
        self.change.eval((p.0 - params.fixed.0, p.1 - params.fixed.1))
    }

    /// Normalized coordinates → original coordinates.
    pub fn from_normal(&self, params: &HenonParams, p: Point) -> Point {
        let (x, y) = self.inverse.eval(p);
        (x + params.fixed.0, y + params.fixed.1)
    }
}

/// `H` in coordinates centered at the fixed point:
/// `(X, Y) ↦ (2x_q X + aY + X², aX)`.
pub fn centered_map(params: &HenonParams, order: usize) -> SeriesMap2 {
    let x = TruncSeries2::x(order);
    let y = TruncSeries2::y(order);
    let first = &(&x.scale(params.fixed.0 * 2.0) + &y.scale(params.a)) + &(&x * &x);
    SeriesMap2::new(first, x.scale(params.a))
}

/// Largest coefficient of `change ∘ H − normal ∘ change`.
pub fn conjugacy_residual(params: &HenonParams, nf: &NormalForm2D) -> Result<f64> {
    let f = centered_map(params, nf.order());
    let lhs = nf.change.compose(&f)?;
    let rhs = nf.normal.compose(&nf.change)?;
    Ok(lhs.distance(&rhs))
}

/// Graph `x = w(y)` of the local strong stable manifold, centered at the
/// fixed point, to order `order`.
///
/// Solves `2x_q w + a y + w² = w(a w(y))` coefficient by coefficient; the
/// tangent is `w′(0) = ν/a = −a/λ_t`. At `a = 0` the manifold is the
/// vertical line and `w ≡ 0`.
pub fn wss_graph(params: &HenonParams, order: usize) -> Result<TruncSeries1> {
    if order < 1 {
        return precondition("strong stable jet needs order ≥ 1");
    }
    if params.nu.norm() >= 1.0 {
        return precondition("strong stable manifold needs |ν| < 1");
    }
    let lambda = params.lambda;
    let nu = params.nu;
    let a = params.a;
    let mut w = TruncSeries1::monomial(order, 1, -a / lambda);
    let y = TruncSeries1::identity(order);
    for k in 2..=order {
        let residual = &(&(&w.scale(params.fixed.0 * 2.0) + &y.scale(a)) + &(&w * &w))
            - &w.compose(&w.scale(a))?;
        let denom = lambda - nu.powu(k as u32);
        if denom.norm() < 1e-10 {
            return Err(Error::ResonanceTooClose);
        }
        w.set(k, -residual[k] / denom)?;
    }
    Ok(w)
}

/// Koenigs linearization `ψ` of `g` (`ψ ∘ g = ν ψ`, `ψ′(0) = 1`).
fn linearize(g: &TruncSeries1, nu: Cx) -> Result<TruncSeries1> {
    let order = g.order();
    let mut psi = TruncSeries1::identity(order);
    if nu.norm() == 0.0 {
        return Ok(psi);
    }
    for k in 2..=order {
        let err = &psi.compose(g)? - &psi.scale(nu);
        let denom = nu.powu(k as u32) - nu;
        if denom.norm() < 1e-10 * nu.norm() {
            return Err(Error::ResonanceTooClose);
        }
        psi.set(k, -err[k] / denom)?;
    }
    Ok(psi)
}

/// Truncated series `Σ_n f(ν^n Y)·ρ^n` for `f` with `f(0) = 0`, summed
/// until the terms stagnate below `1e-14`.
fn geometric_sum(f: &TruncSeries1, nu: Cx, ratio: Cx) -> TruncSeries1 {
    let order = f.order();
    let mut out = TruncSeries1::zero(order);
    let mut nu_n = ONE;
    let mut ratio_n = ONE;
    for _ in 0..10_000 {
        let mut term_max = 0.0f64;
        for j in 1..=order {
            let term = f[j] * nu_n.powu(j as u32) * ratio_n;
            term_max = term_max.max(term.norm());
            out.set(j, out[j] + term).expect("index within order");
        }
        if term_max < 1e-14 * (1.0 + out.max_abs()) {
            break;
        }
        nu_n *= nu;
        ratio_n *= ratio;
    }
    out
}

/// Truncated product `∏_n b(ν^n Y)` for `b(0) = 1`, until the running
/// factor deviates from 1 by less than `1e-14`.
fn geometric_product(b: &TruncSeries1, nu: Cx) -> TruncSeries1 {
    let order = b.order();
    let mut out = b.clone();
    let mut nu_n = nu;
    for _ in 0..10_000 {
        let factor = TruncSeries1::new((0..=order).map(|j| b[j] * nu_n.powu(j as u32)).collect());
        let deviation = (1..=order).map(|j| factor[j].norm()).fold(0.0, f64::max);
        if deviation < 1e-14 {
            break;
        }
        out = &out * &factor;
        nu_n *= nu;
    }
    out
}

struct Reduction {
    map: SeriesMap2,
    change: SeriesMap2,
}

impl Reduction {
    fn apply(&mut self, stage: &SeriesMap2) -> Result<()> {
        let inv = stage.invert()?;
        self.map = stage.compose(&self.map.compose(&inv)?)?;
        self.change = stage.compose(&self.change)?;
        Ok(())
    }
}

/// Compute the normal form jet of total degree `order` (default `2q+4`).
pub fn reduce(params: &HenonParams, order: usize) -> Result<NormalForm2D> {
    let q = params.q() as usize;
    let lambda = params.lambda;
    let nu = params.nu;
    if order < 2 * q + 2 {
        return precondition(format!("normal form needs order ≥ 2q+2 = {}", 2 * q + 2));
    }
    if nu.norm() * lambda.norm().powi(2 * q as i32) >= 1.0 {
        return precondition("normal form needs |ν||λ_t|^{2q} < 1");
    }
    let x = TruncSeries2::x(order);
    let y = TruncSeries2::y(order);

    let wss = wss_graph(params, order)?;
    let psi = linearize(&wss.scale(params.a), nu)?;
    let straightening = SeriesMap2::new(
        &x - &TruncSeries2::from_y_series(order, &wss),
        TruncSeries2::from_y_series(order, &psi),
    );
    let mut red = Reduction { map: centered_map(params, order), change: SeriesMap2::identity(order) };
    red.apply(&straightening)?;

    let beta = red.map.y.get(1, 0)?;
    let kappa = -beta / (lambda - nu);
    red.apply(&SeriesMap2::new(x.clone(), &y + &x.scale(kappa)))?;

    let b1 = red.map.x.x_coefficient(1)?.scale(lambda.inv());
    let u = geometric_product(&b1, nu);
    let ux = &TruncSeries2::from_y_series(order, &u) * &x;
    red.apply(&SeriesMap2::new(ux, y.clone()))?;

    for k in 2..=2 * q + 1 {
        let ak = red.map.x.x_coefficient(k)?;
        let mut varying = ak.clone();
        varying.set(0, ZERO)?;
        let v = geometric_sum(&varying, nu, lambda.powu(k as u32 - 1)).scale(lambda.inv());
        let vx = &TruncSeries2::from_y_series(order, &v) * &x.pow(k as u32);
        red.apply(&SeriesMap2::new(&x + &vx, y.clone()))?;
    }

    let mut scale = ONE;
    for k in 2..=2 * q + 1 {
        let stage = if k == q + 1 {
            let a = red.map.x.get(q + 1, 0)? / lambda;
            if a.norm() < 1e-300 {
                return Err(Error::Numerical("vanishing x^{q+1} coefficient".into()));
            }
            scale = a.powf(1.0 / q as f64);
            SeriesMap2::new(x.scale(scale), y.clone())
        } else if (k - 1) % q != 0 {
            let gap = lambda - lambda.powu(k as u32);
            if gap.norm() < 1e-8 {
                return Err(Error::ResonanceTooClose);
            }
            let b = red.map.x.get(k, 0)? / gap;
            SeriesMap2::new(&x + &x.pow(k as u32).scale(b), y.clone())
        } else {
            continue;
        };
        red.apply(&stage)?;
    }

    let inverse = red.change.invert()?;
    let c_coef = red.map.x.get(2 * q + 1, 0)? / lambda;
    Ok(NormalForm2D {
        change: red.change,
        inverse,
        normal: red.map,
        c_coef,
        wss,
        scale,
        straightening,
    })
}

/// Settings for [`petal_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct PetalConfig {
    pub samples: usize,
    pub steps: usize,
    pub tolerance: f64,
    /// Petal parameter `R`; `None` picks the smallest `R` whose petals fit
    /// in `|x| ≤ 0.15`, capped below the invariance limit `≈ 1/(qt)`.
    pub petal_r: Option<f64>,
    pub height: f64,
    pub seed: u64,
}

impl Default for PetalConfig {
    fn default() -> Self {
        Self { samples: 1000, steps: 500, tolerance: 1e-6, petal_r: None, height: LOCAL_HEIGHT, seed: 7 }
    }
}

/// What the sampled orbits are expected to converge to.
#[derive(Clone, Debug)]
pub enum Target {
    /// `t > 0`: the attracting `q`-cycle.
    Cycle(Vec<Point>),
    /// `t < 0`: the fixed point itself.
    FixedPoint(Point),
    /// `t = 0`: no attraction claim.
    None,
}

/// Per-sample outcome.
#[derive(Clone, Debug)]
pub struct SampleRecord {
    /// Start in normalized coordinates.
    pub start: Point,
    /// Last iterate in original coordinates.
    pub end: Point,
    pub petal: u32,
    /// One step maps the petal into the rotated petal (petal samples only).
    pub rotation_ok: Option<bool>,
    /// Steps until within tolerance of the target, if reached.
    pub steps_to_target: Option<usize>,
    /// Distance to the target after the last step.
    pub final_distance: f64,
}

/// Result of [`petal_check`]. Failures are data, not errors.
#[derive(Clone, Debug)]
pub struct TrappingReport {
    pub petal_r: f64,
    pub target: Target,
    pub records: Vec<SampleRecord>,
    pub rotation_failures: usize,
    pub convergence_failures: usize,
    /// Largest `|x|` below which every sampled petal point passed.
    pub max_verified_radius: f64,
    /// Largest `|y₁|/height` over one-step images of petal samples.
    pub max_image_height: f64,
}

impl TrappingReport {
    pub fn passed(&self) -> bool {
        self.rotation_failures == 0 && self.convergence_failures == 0
    }

    pub fn converged_fraction(&self) -> f64 {
        let tested: Vec<_> = self.records.iter().filter(|r| !r.final_distance.is_nan()).collect();
        if tested.is_empty() {
            return 1.0;
        }
        tested.iter().filter(|r| r.steps_to_target.is_some()).count() as f64 / tested.len() as f64
    }
}

/// Membership in the petal disk pair `Δ_R` (a condition on `w = x^q`).
pub fn in_petal_disks(w: Cx, petal_r: f64) -> bool {
    let h = 1.0 / (2.0 * petal_r);
    (w.re + h).powi(2) + (w.im.abs() - h).powi(2) < 1.0 / (2.0 * petal_r * petal_r)
}

/// Index `j` of the sector `2πj/q < arg x < 2π(j+1)/q`.
pub fn petal_index(x: Cx, q: u32) -> u32 {
    let arg = x.arg().rem_euclid(2.0 * PI);
    ((arg * q as f64 / (2.0 * PI)).floor() as u32).min(q - 1)
}

fn default_petal_r(q: u32, t: f64) -> f64 {
    let fit = 2f64.sqrt() / SECTOR_RADIUS.powi(q as i32);
    if t > 0.0 {
        let limit = 0.9 / ((1.0 + t).powi(q as i32) - 1.0);
        fit.min(limit)
    } else {
        fit
    }
}

fn sample_petal(rng: &mut ChaCha8Rng, q: u32, petal_r: f64, j: u32) -> Cx {
    let h = 1.0 / (2.0 * petal_r);
    let rad = 1.0 / (2f64.sqrt() * petal_r);
    loop {
        let w = Cx::new(rng.gen_range(-h - rad..-h + rad), rng.gen_range(-h - rad..h + rad));
        if w.norm() > 0.0 && in_petal_disks(w, petal_r) {
            let arg = w.arg().rem_euclid(2.0 * PI);
            let r = w.norm().powf(1.0 / q as f64);
            return Cx::from_polar(r, (arg + 2.0 * PI * j as f64) / q as f64);
        }
    }
}

fn sample_disk(rng: &mut ChaCha8Rng, radius: f64) -> Cx {
    let r = radius * rng.gen::<f64>().sqrt();
    Cx::from_polar(r, 2.0 * PI * rng.gen::<f64>())
}

/// Sample petals (and, for `t < 0`, the absorbing disk `|x|^q ≤ R_t`),
/// checking one-step petal rotation and convergence to the expected target.
pub fn petal_check(params: &HenonParams, nf: &NormalForm2D, cfg: &PetalConfig) -> Result<TrappingReport> {
    if cfg.samples < 1000 {
        return precondition("petal_check needs at least 10³ samples");
    }
    let q = params.q();
    let p = params.rotation.p() % q;
    let petal_r = cfg.petal_r.unwrap_or_else(|| default_petal_r(q, params.t));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let target = if params.t > 0.0 {
        let w0 = Cx::new(-0.5 / petal_r, 0.0);
        let center = Cx::from_polar(w0.norm().powf(1.0 / q as f64), PI / q as f64);
        let seed = nf.from_normal(params, (center, ZERO));
        Target::Cycle(attracting_cycle(params, seed, q as usize)?.points)
    } else if params.t < 0.0 {
        Target::FixedPoint(params.fixed)
    } else {
        Target::None
    };

    let mut starts: Vec<(Point, u32, bool)> = (0..cfg.samples)
        .map(|i| {
            let j = (i as u32) % q;
            ((sample_petal(&mut rng, q, petal_r, j), sample_disk(&mut rng, cfg.height)), j, true)
        })
        .collect();
    if params.t < 0.0 {
        let radius = inner_radius(q, params.t).powf(1.0 / q as f64);
        for _ in 0..cfg.samples {
            let x = sample_disk(&mut rng, radius);
            starts.push(((x, sample_disk(&mut rng, cfg.height)), petal_index(x, q), false));
        }
    }

    let distance = |pt: Point| match &target {
        Target::Cycle(c) => c.iter().map(|z| dist(*z, pt)).fold(f64::INFINITY, f64::min),
        Target::FixedPoint(f) => dist(*f, pt),
        Target::None => f64::NAN,
    };

    let results: Vec<(SampleRecord, f64)> = starts
        .par_iter()
        .map(|&(start, j, is_petal)| {
            let orig = nf.from_normal(params, start);
            let first = params.apply(orig);
            let (x1, y1) = nf.to_normal(params, first);
            let rotation_ok = is_petal.then(|| {
                let landed = in_petal_disks(x1.powu(q), petal_r) && petal_index(x1, q) == (j + p) % q;
                (landed || x1.norm() < 1e-12) && y1.norm() < cfg.height
            });
            let image_height = if is_petal { y1.norm() / cfg.height } else { 0.0 };
            let check_target = !matches!(target, Target::None) && (params.t > 0.0) == is_petal;
            let mut pt = orig;
            let mut steps_to_target = None;
            if check_target {
                for n in 0..=cfg.steps {
                    if distance(pt) < cfg.tolerance {
                        steps_to_target = Some(n);
                        break;
                    }
                    if n < cfg.steps {
                        pt = params.apply(pt);
                    }
                }
            }
            let record = SampleRecord {
                start,
                end: pt,
                petal: j,
                rotation_ok,
                steps_to_target,
                final_distance: if check_target { distance(pt) } else { f64::NAN },
            };
            (record, image_height)
        })
        .collect();

    let mut records = Vec::with_capacity(results.len());
    let mut max_image_height = 0.0f64;
    for (r, h) in results {
        max_image_height = max_image_height.max(h);
        records.push(r);
    }
    let needs_target = |r: &SampleRecord| !r.final_distance.is_nan();
    let rotation_failures = records.iter().filter(|r| r.rotation_ok == Some(false)).count();
    let convergence_failures = records
        .iter()
        .filter(|r| needs_target(r) && r.steps_to_target.is_none())
        .count();

    let mut petal: Vec<&SampleRecord> = records.iter().filter(|r| r.rotation_ok.is_some()).collect();
    petal.sort_by(|a, b| a.start.0.norm().total_cmp(&b.start.0.norm()));
    let mut max_verified_radius = 0.0;
    for r in petal {
        let ok = r.rotation_ok == Some(true) && (!needs_target(r) || r.steps_to_target.is_some());
        if !ok {
            break;
        }
        max_verified_radius = r.start.0.norm();
    }

    Ok(TrappingReport {
        petal_r,
        target,
        records,
        rotation_failures,
        convergence_failures,
        max_verified_radius,
        max_image_height,
    })
}
