//! Sampled cone-field checks.
//!
//! Local checks run in normalized coordinates on the repelling sectors,
//! with horizontal cones `|ξ| ≥ |η|`, vertical cones `|ξ| ≤ |x|^{2q}|η|`
//! and the max norm. Global checks run in original coordinates on samples
//! of the neighborhood `V` of `J⁺`, with horizontal cones `|ξ| ≥ |η|`,
//! vertical cones `|ξ| ≤ τ|η|`, and either the max norm or an adapted norm
//! averaging `‖DH^k v‖` along the forward orbit.
//!
//! Every check is evaluated on a finite frame of boundary directions per
//! cone. Results are "verified at samples", never proofs.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as Cx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{precondition, Result};
use crate::henon::{make_params, HenonParams, Point};
use crate::normalform2d::{reduce, NormalForm2D, LOCAL_HEIGHT};
use crate::poly1d::{caratheodory, eps0, eps1, eps2, in_repelling_cone, inner_radius, LoopSample, Rotation, SECTOR_RADIUS};
use crate::series::TruncSeries2;

/// Boundary directions sampled per cone.
pub const DIRECTIONS: usize = 16;
/// Reported vertical expansion when `DH` is singular (`a = 0`).
pub const VERTICAL_SENTINEL: f64 = 1e12;
/// Expansion deficit still reported as marginal rather than failing.
pub const MARGIN_TOLERANCE: f64 = 0.02;

/// Which family of cones a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Local,
    Global,
    Intersection,
}

/// Density used for the horizontal component in global checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    /// Max norm in normalized coordinates.
    Normalized,
    /// Plain Euclidean density `ρ ≡ 1`.
    Euclidean,
    /// Finsler norm `‖v‖_P = (1/n) Σ_{k<n} ‖DH^k_P v‖_∞` along the orbit of `P`.
    Adapted(usize),
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Normalized => write!(f, "normalized"),
            Metric::Euclidean => write!(f, "euclidean"),
            Metric::Adapted(n) => write!(f, "adapted({n})"),
        }
    }
}

/// Aggregated outcome of a cone check.
#[derive(Clone, Debug)]
pub struct ConeReport {
    pub region: Region,
    pub metric: Metric,
    pub samples: usize,
    /// Minimum over samples and directions of the horizontal expansion.
    pub worst_h_expansion: f64,
    /// Minimum over samples and directions of the `DH⁻¹` vertical expansion.
    pub worst_v_expansion: f64,
    /// Samples where a cone image left the open target cone.
    pub invariance_failures: Vec<Point>,
    /// Local only: samples whose expansion is below `|λ_t|(1+(q+1/2)ε1|x|^q)`.
    pub h_bound_failures: usize,
    /// Local only: smallest `|x|^q` among samples.
    pub min_abs_x_pow_q: f64,
    /// Local only: `max |∂(xh)|` over samples, the measured `N_{a,t}`.
    pub n_surrogate: f64,
    /// Largest `h-expansion × v-contraction / |det DH|` over samples.
    pub det_ratio_max: f64,
    /// Smallest `h-expansion × v-contraction / |det DH|` over samples.
    pub det_ratio_min: f64,
}

impl ConeReport {
    fn empty(region: Region, metric: Metric) -> Self {
        Self {
            region,
            metric,
            samples: 0,
            worst_h_expansion: f64::INFINITY,
            worst_v_expansion: f64::INFINITY,
            invariance_failures: Vec::new(),
            h_bound_failures: 0,
            min_abs_x_pow_q: f64::INFINITY,
            n_surrogate: 0.0,
            det_ratio_max: 0.0,
            det_ratio_min: f64::INFINITY,
        }
    }

    fn absorb(mut self, s: SampleOutcome) -> Self {
        self.samples += 1;
        self.worst_h_expansion = self.worst_h_expansion.min(s.h_expansion);
        self.worst_v_expansion = self.worst_v_expansion.min(s.v_expansion);
        if !s.invariant {
            self.invariance_failures.push(s.point);
        }
        self.h_bound_failures += usize::from(!s.h_bound_ok);
        self.min_abs_x_pow_q = self.min_abs_x_pow_q.min(s.abs_x_pow_q);
        self.n_surrogate = self.n_surrogate.max(s.n_surrogate);
        if s.det_ratio.is_finite() {
            self.det_ratio_max = self.det_ratio_max.max(s.det_ratio);
            self.det_ratio_min = self.det_ratio_min.min(s.det_ratio);
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        self.worst_h_expansion = self.worst_h_expansion.min(other.worst_h_expansion);
        self.worst_v_expansion = self.worst_v_expansion.min(other.worst_v_expansion);
        self.invariance_failures.extend(other.invariance_failures);
        self.h_bound_failures += other.h_bound_failures;
        self.min_abs_x_pow_q = self.min_abs_x_pow_q.min(other.min_abs_x_pow_q);
        self.n_surrogate = self.n_surrogate.max(other.n_surrogate);
        self.det_ratio_max = self.det_ratio_max.max(other.det_ratio_max);
        self.det_ratio_min = self.det_ratio_min.min(other.det_ratio_min);
        self
    }

    /// Zero invariance failures and both expansions above 1.
    pub fn passed(&self) -> bool {
        self.invariance_failures.is_empty() && self.worst_h_expansion > 1.0 && self.worst_v_expansion > 1.0
    }
}

struct SampleOutcome {
    point: Point,
    h_expansion: f64,
    v_expansion: f64,
    invariant: bool,
    h_bound_ok: bool,
    abs_x_pow_q: f64,
    n_surrogate: f64,
    det_ratio: f64,
}

fn frame(k: usize) -> Cx {
    Cx::from_polar(1.0, 2.0 * PI * k as f64 / DIRECTIONS as f64)
}

fn apply(m: &[[Cx; 2]; 2], v: Point) -> Point {
    (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
}

fn inverse(m: &[[Cx; 2]; 2]) -> Option<[[Cx; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    if det.norm() <= 1e-300 || det.norm() < 1e-15 * scale * scale {
        return None;
    }
    let inv = det.inv();
    Some([[m[1][1] * inv, -m[0][1] * inv], [-m[1][0] * inv, m[0][0] * inv]])
}

/// Horizontal cone `|ξ| ≥ |η|` mapped by `m` into `|ξ'| > |η'|`, max norm.
/// Returns (invariant, min expansion).
fn horizontal(m: &[[Cx; 2]; 2]) -> (bool, f64) {
    let mut invariant = true;
    let mut worst = f64::INFINITY;
    let dirs = (0..DIRECTIONS).map(|k| (Cx::new(1.0, 0.0), frame(k))).chain([(Cx::new(1.0, 0.0), Cx::new(0.0, 0.0))]);
    for v in dirs {
        let (xi, eta) = apply(m, v);
        invariant &= xi.norm() > eta.norm();
        worst = worst.min(xi.norm().max(eta.norm()) / v.0.norm().max(v.1.norm()));
    }
    (invariant, worst)
}

/// Vertical cone `|ξ| ≤ w_dst |η|` at the image pulled back by `m⁻¹` into
/// `|ξ| < w_src |η|`, max norm. Returns (invariant, min expansion).
fn vertical(m: &[[Cx; 2]; 2], w_src: f64, w_dst: f64) -> (bool, f64) {
    let Some(inv) = inverse(m) else {
        return (true, VERTICAL_SENTINEL);
    };
    let mut invariant = true;
    let mut worst = f64::INFINITY;
    let dirs = (0..DIRECTIONS).map(|k| (frame(k) * w_dst, Cx::new(1.0, 0.0))).chain([(Cx::new(0.0, 0.0), Cx::new(1.0, 0.0))]);
    for v in dirs {
        let (xi, eta) = apply(&inv, v);
        invariant &= xi.norm() < w_src * eta.norm();
        worst = worst.min(xi.norm().max(eta.norm()) / v.0.norm().max(v.1.norm()));
    }
    (invariant, worst.min(VERTICAL_SENTINEL))
}

/// Deterministic samples of the repelling sectors `W⁻` (`t ≥ 0`) or
/// `W⁻_{R_t}` (`t < 0`) in normalized coordinates, spread over all `q`
/// petals, with `|y| < height`. For `t ≥ 0` the radius starts at `min_abs_x`.
pub fn sector_samples(params: &HenonParams, count: usize, min_abs_x: f64, height: f64, seed: u64) -> Vec<Point> {
    let q = params.q();
    let qf = q as f64;
    let half_angle = (1.0 / eps0()).atan();
    let outer = SECTOR_RADIUS.powi(q as i32);
    let inner = if params.t < 0.0 { inner_radius(q, params.t) } else { min_abs_x.powi(q as i32) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let r = inner + (outer - inner) * (0.001 + 0.998 * rng.gen::<f64>());
            let phi = half_angle * 0.999 * (2.0 * rng.gen::<f64>() - 1.0);
            let j = (i as u32 % q) as f64;
            let x = Cx::from_polar(r.powf(1.0 / qf), (phi + 2.0 * PI * j) / qf);
            let y = Cx::from_polar(height * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
            (x, y)
        })
        .collect()
}

fn in_local_sector(params: &HenonParams, p: Point, height: f64) -> bool {
    let q = params.q();
    let w = p.0.powu(q);
    let inner_ok = params.t >= 0.0 || w.norm() > inner_radius(q, params.t);
    p.0.norm() < SECTOR_RADIUS && in_repelling_cone(w) && inner_ok && p.1.norm() <= height
}

/// Cone invariance and expansion for the normal form jet on sector samples.
///
/// Errors when a sample lies outside `W⁻` (or `W⁻_{R_t}`).
pub fn local_cone_check(params: &HenonParams, nf: &NormalForm2D, samples: &[Point]) -> Result<ConeReport> {
    if let Some(p) = samples.iter().find(|p| !in_local_sector(params, **p, LOCAL_HEIGHT)) {
        return precondition(format!("sample ({}, {}) outside the repelling sector", p.0, p.1));
    }
    let q = params.q();
    let two_q = 2 * q as i32;
    let lambda_abs = params.lambda.norm();
    let y = TruncSeries2::y(nf.order());
    let xh = &nf.normal.y - &y.scale(params.nu);
    let (xh_x, xh_y) = (xh.dx(), xh.dy());
    let report = samples
        .par_iter()
        .map(|&p| {
            let m = nf.normal.jacobian(p);
            let p1 = nf.normal.eval(p);
            let (invariant_h, h) = horizontal(&m);
            let (invariant_v, v) = vertical(&m, p.0.norm().powi(two_q), p1.0.norm().powi(two_q));
            let xq = p.0.norm().powi(q as i32);
            let bound = lambda_abs * (1.0 + (q as f64 + 0.5) * eps1() * xq);
            let n = xh_x.eval(p.0, p.1).norm().max(xh_y.eval(p.0, p.1).norm());
            let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
            SampleOutcome {
                point: p,
                h_expansion: h,
                v_expansion: v,
                invariant: invariant_h && invariant_v,
                h_bound_ok: h >= bound,
                abs_x_pow_q: xq,
                n_surrogate: n,
                det_ratio: h / v / det,
            }
        })
        .fold(|| ConeReport::empty(Region::Local, Metric::Normalized), ConeReport::absorb)
        .reduce(|| ConeReport::empty(Region::Local, Metric::Normalized), ConeReport::merge);
    Ok(report)
}

/// Lemma gap `|λ_t|(1+(q+1/2)ε1|x|^q) − (1+ε2|t|)(1+(ε1/16)|x|^q)`.
pub fn expansion_lemma_gap(q: u32, t: f64, abs_x_pow_q: f64) -> f64 {
    let e1 = eps1();
    (1.0 + t) * (1.0 + (q as f64 + 0.5) * e1 * abs_x_pow_q) - (1.0 + eps2(q) * t.abs()) * (1.0 + e1 / 16.0 * abs_x_pow_q)
}

/// Description of the neighborhood `V` sampled by [`global_cone_check`].
///
/// `V` is realized as points `(γ_t(s) − a z/(2γ_t(s)), z)` with `|z| < height`
/// near the first-order graph of `J⁺`, minus the tube
/// `B'' = D_{ρ'/2}(α_t) × D_r` handled by the local check.
#[derive(Clone, Debug, PartialEq)]
pub struct VSpec {
    /// Radius `ρ'` of `B = D_{ρ'}(α_t) × D_r`; `B′` is the disk at `−α_t`.
    pub rho_prime: f64,
    pub height: f64,
    /// Vertical cone opening `τ`.
    pub tau: f64,
    /// Orbit length for the adapted norm.
    pub adapted_steps: usize,
    /// Loop resolution and pullbacks used to sample `γ_t`.
    pub angles: usize,
    pub loop_iters: usize,
    pub seed: u64,
}

impl Default for VSpec {
    fn default() -> Self {
        Self { rho_prime: 0.15, height: 1.0, tau: 0.25, adapted_steps: 8, angles: 1024, loop_iters: 40, seed: 11 }
    }
}

impl VSpec {
    fn validate(&self, params: &HenonParams) -> Result<()> {
        if self.rho_prime <= 0.0 || self.rho_prime >= params.poly.alpha.norm() {
            return precondition("V_spec inconsistent: B′ overlaps B");
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return precondition("V_spec needs 0 < τ < 1");
        }
        if self.height <= 0.0 || self.adapted_steps == 0 {
            return precondition("V_spec needs positive height and adapted_steps");
        }
        Ok(())
    }

    /// Points of `V − B''` near the first-order graph of `J⁺`.
    pub fn samples(&self, params: &HenonParams, loop_curve: &LoopSample, count: usize) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let a = params.a;
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let s: f64 = rng.gen();
            let z = Cx::from_polar(self.height * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
            let g = loop_curve.at_angle(s);
            let x = g - a * z / (g * 2.0);
            if (x - params.poly.alpha).norm() >= self.rho_prime / 2.0 {
                out.push((x, z));
            }
        }
        out
    }
}

/// Mean of `‖DH^k v‖_∞` over `k < jacobians.len()`.
fn adapted_norm(jacobians: &[[[Cx; 2]; 2]], v: Point) -> f64 {
    let mut w = v;
    let mut sum = 0.0;
    for m in jacobians {
        sum += w.0.norm().max(w.1.norm());
        w = apply(m, w);
    }
    sum / jacobians.len() as f64
}

fn global_pass(params: &HenonParams, spec: &VSpec, samples: &[Point], metric: Metric) -> ConeReport {
    let steps = match metric {
        Metric::Adapted(n) => n,
        _ => 1,
    };
    samples
        .par_iter()
        .map(|&p| {
            let mut jacobians = Vec::with_capacity(steps + 1);
            let mut pt = p;
            for _ in 0..=steps {
                jacobians.push(params.jacobian(pt));
                pt = params.apply(pt);
            }
            let m = jacobians[0];
            let mut invariant = true;
            let mut h = f64::INFINITY;
            let dirs = (0..DIRECTIONS).map(|k| (Cx::new(1.0, 0.0), frame(k))).chain([(Cx::new(1.0, 0.0), Cx::new(0.0, 0.0))]);
            for v in dirs {
                let w = apply(&m, v);
                invariant &= w.1.norm() < w.0.norm();
                let ratio = match metric {
                    Metric::Adapted(n) => adapted_norm(&jacobians[1..=n], w) / adapted_norm(&jacobians[..n], v),
                    _ => w.0.norm().max(w.1.norm()) / v.0.norm().max(v.1.norm()),
                };
                h = h.min(ratio);
            }
            let (invariant_v, v) = vertical(&m, spec.tau, spec.tau);
            SampleOutcome {
                point: p,
                h_expansion: h,
                v_expansion: v,
                invariant: invariant && invariant_v,
                h_bound_ok: true,
                abs_x_pow_q: f64::NAN,
                n_surrogate: 0.0,
                det_ratio: h / v / params.a.norm_sqr(),
            }
        })
        .fold(|| ConeReport::empty(Region::Global, metric), ConeReport::absorb)
        .reduce(|| ConeReport::empty(Region::Global, metric), ConeReport::merge)
}

/// Horizontal/vertical cone check on samples of `V − B''`.
///
/// The max norm is tried first; when it does not certify, the adapted norm
/// over `adapted_steps` forward iterates is used. The
/// report names the metric that produced it.
pub fn global_cone_check(params: &HenonParams, spec: &VSpec, sample_count: usize) -> Result<ConeReport> {
    if params.a.norm() == 0.0 {
        return precondition("global cone check needs a ≠ 0");
    }
    spec.validate(params)?;
    let loop_curve = caratheodory(&params.poly, spec.angles, spec.loop_iters)?.curve;
    let samples = spec.samples(params, &loop_curve, sample_count);
    Ok(global_check_on(params, spec, &samples))
}

/// [`global_cone_check`] on caller-supplied samples.
pub fn global_check_on(params: &HenonParams, spec: &VSpec, samples: &[Point]) -> ConeReport {
    let euclid = global_pass(params, spec, samples, Metric::Euclidean);
    if euclid.passed() {
        return euclid;
    }
    global_pass(params, spec, samples, Metric::Adapted(spec.adapted_steps))
}

/// Intersected cones on points of `B − B''` whose normalized coordinates
/// lie in the repelling sector: a direction belongs to the cone at `P` when
/// it lies in the Euclidean global cone and its normalized image lies in the
/// local cone. Boundary directions of each family that lie in the other
/// are mapped and must land in both target cones.
pub fn intersected_cone_check(params: &HenonParams, nf: &NormalForm2D, spec: &VSpec, samples: &[Point]) -> ConeReport {
    let q = params.q() as i32;
    samples
        .par_iter()
        .filter_map(|&p| {
            let local = nf.to_normal(params, p);
            if !in_local_sector(params, local, LOCAL_HEIGHT) || (p.0 - params.poly.alpha).norm() < spec.rho_prime / 2.0 {
                return None;
            }
            let p1 = params.apply(p);
            let dphi = nf.change.jacobian((p.0 - params.fixed.0, p.1 - params.fixed.1));
            let dphi1 = nf.change.jacobian((p1.0 - params.fixed.0, p1.1 - params.fixed.1));
            let m = params.jacobian(p);
            let in_h_local = |d: &[[Cx; 2]; 2], v: Point, strict: bool| {
                let (xi, eta) = apply(d, v);
                if strict { xi.norm() > eta.norm() } else { xi.norm() >= eta.norm() * (1.0 - 1e-12) }
            };
            let in_h_global = |v: Point, strict: bool| {
                if strict { v.0.norm() > v.1.norm() } else { v.0.norm() >= v.1.norm() * (1.0 - 1e-12) }
            };
            let dphi_inv = inverse(&dphi)?;
            let mut dirs: Vec<Point> = (0..DIRECTIONS).map(|k| (Cx::new(1.0, 0.0), frame(k))).collect();
            dirs.extend((0..DIRECTIONS).map(|k| apply(&dphi_inv, (Cx::new(1.0, 0.0), frame(k)))));
            dirs.push((Cx::new(1.0, 0.0), Cx::new(0.0, 0.0)));
            let mut invariant = true;
            let mut h = f64::INFINITY;
            for v in dirs.into_iter().filter(|v| in_h_global(*v, false) && in_h_local(&dphi, *v, false)) {
                let w = apply(&m, v);
                invariant &= in_h_global(w, true) && in_h_local(&dphi1, w, true);
                h = h.min(w.0.norm().max(w.1.norm()) / v.0.norm().max(v.1.norm()));
            }
            let (_, v) = vertical(&m, spec.tau, spec.tau);
            Some(SampleOutcome {
                point: p,
                h_expansion: h,
                v_expansion: v,
                invariant,
                h_bound_ok: true,
                abs_x_pow_q: local.0.norm().powi(q),
                n_surrogate: 0.0,
                det_ratio: f64::NAN,
            })
        })
        .fold(|| ConeReport::empty(Region::Intersection, Metric::Euclidean), ConeReport::absorb)
        .reduce(|| ConeReport::empty(Region::Intersection, Metric::Euclidean), ConeReport::merge)
}

/// Per-cell outcome of [`hyperbolicity_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Cones invariant, expansion margin within [`MARGIN_TOLERANCE`] of 1
    /// or `t = 0` (no uniform expansion near `W^ss`).
    Marginal,
    Fail,
    /// `a = 0` or parameters outside the standing bounds.
    Excluded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Marginal => "MARGINAL",
            Verdict::Fail => "FAIL",
            Verdict::Excluded => "EXCLUDED",
        };
        f.write_str(s)
    }
}

/// One cell of a hyperbolicity scan.
#[derive(Clone, Debug)]
pub struct ScanCell {
    pub t: f64,
    pub a: f64,
    pub verdict: Verdict,
    /// `min(worst_h, worst_v) − 1` over both checks (NaN when excluded).
    pub margin: f64,
    pub local: Option<ConeReport>,
    pub global: Option<ConeReport>,
}

/// Sample sizes for [`hyperbolicity_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub local_samples: usize,
    pub global_samples: usize,
    pub min_abs_x: f64,
    pub spec: VSpec,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { local_samples: 2000, global_samples: 2000, min_abs_x: 1e-3, spec: VSpec::default() }
    }
}

fn scan_cell(rotation: Rotation, t: f64, a: f64, cfg: &ScanConfig) -> ScanCell {
    let excluded = ScanCell { t, a, verdict: Verdict::Excluded, margin: f64::NAN, local: None, global: None };
    if a == 0.0 {
        return excluded;
    }
    let Ok(params) = make_params(rotation, t, Cx::new(a, 0.0)) else {
        return excluded;
    };
    let fail = ScanCell { verdict: Verdict::Fail, ..excluded.clone() };
    let Ok(nf) = reduce(&params, 2 * params.q() as usize + 4) else {
        return fail;
    };
    let samples = sector_samples(&params, cfg.local_samples, cfg.min_abs_x, LOCAL_HEIGHT, cfg.spec.seed);
    let (Ok(local), Ok(global)) = (local_cone_check(&params, &nf, &samples), global_cone_check(&params, &cfg.spec, cfg.global_samples)) else {
        return fail;
    };
    let margin = [local.worst_h_expansion, local.worst_v_expansion, global.worst_h_expansion, global.worst_v_expansion]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        - 1.0;
    let invariant = local.invariance_failures.is_empty() && global.invariance_failures.is_empty();
    let verdict = if !invariant {
        Verdict::Fail
    } else if t != 0.0 && local.passed() && global.passed() {
        Verdict::Pass
    } else if t == 0.0 || margin > -MARGIN_TOLERANCE {
        Verdict::Marginal
    } else {
        Verdict::Fail
    };
    ScanCell { t, a, verdict, margin, local: Some(local), global: Some(global) }
}

/// Verdict grid over `t_values × a_values` (real `a`), row-major in `t`.
pub fn hyperbolicity_scan(rotation: Rotation, t_values: &[f64], a_values: &[f64], cfg: &ScanConfig) -> Vec<ScanCell> {
    t_values
        .iter()
        .flat_map(|&t| a_values.iter().map(move |&a| (t, a)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(t, a)| scan_cell(rotation, t, a, cfg))
        .collect()
}
