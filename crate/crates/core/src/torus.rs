//! Solid tori of vertical-like disks, the graph transform and its fixed
//! point `f*(s, z) = (φ_s(z), z)`, the angle-doubling model `σ`, and the
//! model map `ψ_t`.
//!
//! Each disk `φ_s` is stored as a Taylor polynomial of degree `d` in `z`,
//! fitted on `2d` nodes of the circle `|z| = 0.9r`. Angles live on the grid
//! `s = k/N`, so doubling maps the grid to itself.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;
use rayon::prelude::*;

use crate::error::{precondition, Error, Result};
use crate::henon::{HenonParams, Point, PointCloud};
use crate::poly1d::{base_loop, pullback_loop, stitch_roots, LoopSample};

/// Default polynomial degree of each disk.
pub const DISK_DEGREE: usize = 8;
/// Collocation circle radius as a fraction of `r`.
pub const NODE_FRACTION: f64 = 0.9;
/// Newton step cap per node.
pub const NEWTON_STEPS: usize = 50;

/// `f_n`: one polynomial disk per grid angle.
#[derive(Clone, Debug, PartialEq)]
pub struct SolidTorus {
    pub n_angles: usize,
    pub disk_degree: usize,
    /// `coeffs[k][i]`: coefficient of `z^i` of `φ_{k/N}`.
    pub coeffs: Vec<Vec<Cx>>,
    /// Graph-transform iterations applied to the seed.
    pub level: usize,
    /// Disk radius `r`.
    pub radius: f64,
    /// Largest defining-equation residual at the Newton roots of the last
    /// transform (0 for a seed).
    pub node_residual: f64,
}

fn horner(coeffs: &[Cx], z: Cx) -> Cx {
    coeffs.iter().rev().fold(Cx::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Cx], z: Cx) -> (Cx, Cx) {
    let mut value = Cx::new(0.0, 0.0);
    let mut deriv = Cx::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

impl SolidTorus {
    /// `φ_{k/N}(z)`.
    pub fn eval(&self, k: usize, z: Cx) -> Cx {
        horner(&self.coeffs[k % self.n_angles], z)
    }

    /// `φ_s'(z)` at a grid angle.
    pub fn eval_derivative(&self, k: usize, z: Cx) -> Cx {
        horner_with_derivative(&self.coeffs[k % self.n_angles], z).1
    }

    /// `φ_s(z)` at any angle, linear in `s` between grid angles.
    pub fn eval_angle(&self, s: f64, z: Cx) -> Cx {
        let u = s.rem_euclid(1.0) * self.n_angles as f64;
        let k = u.floor() as usize;
        let frac = u - k as f64;
        let lo = self.eval(k, z);
        if frac == 0.0 {
            return lo;
        }
        lo * (1.0 - frac) + self.eval(k + 1, z) * frac
    }

    /// Disk centers `φ_s(0)` as a loop.
    pub fn centers(&self) -> LoopSample {
        LoopSample { values: self.coeffs.iter().map(|c| c[0]).collect(), level: 0.0 }
    }

    /// Collocation nodes `0.9r·e^{2πij/(2d)}`.
    pub fn nodes(&self) -> Vec<Cx> {
        collocation_nodes(self.disk_degree, self.radius)
    }

    /// Probe points for sup distances: the center and the nodes.
    fn probes(&self) -> Vec<Cx> {
        let mut out = vec![Cx::new(0.0, 0.0)];
        out.extend(self.nodes());
        out
    }

    /// Sup over angles and probe points of `|φ_s − ψ_s|`.
    pub fn sup_distance(&self, other: &SolidTorus) -> f64 {
        let probes = self.probes();
        (0..self.n_angles)
            .into_par_iter()
            .map(|k| probes.iter().map(|&z| (self.eval(k, z) - other.eval(k, z)).norm()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    /// `min_s sup_z |φ_s(z) − φ_{s+1/2}(z)|`, the injectivity proxy.
    pub fn separation(&self) -> f64 {
        let half = self.n_angles / 2;
        let probes = self.probes();
        (0..half)
            .into_par_iter()
            .map(|k| probes.iter().map(|&z| (self.eval(k, z) - self.eval(k + half, z)).norm()).fold(0.0, f64::max))
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// `max |φ_s'(z)|` over angles and `|z| = r`.
    pub fn max_slope(&self) -> f64 {
        let ring: Vec<Cx> = (0..4 * self.disk_degree)
            .map(|j| Cx::from_polar(self.radius, 2.0 * PI * j as f64 / (4 * self.disk_degree) as f64))
            .collect();
        (0..self.n_angles)
            .into_par_iter()
            .map(|k| ring.iter().map(|&z| self.eval_derivative(k, z).norm()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }
}

fn collocation_nodes(d: usize, radius: f64) -> Vec<Cx> {
    let m = 2 * d;
    (0..m).map(|j| Cx::from_polar(NODE_FRACTION * radius, 2.0 * PI * j as f64 / m as f64)).collect()
}

/// Least-squares degree-`d` fit on the `2d` equispaced nodes (a discrete
/// Fourier projection, since the monomials are orthogonal there).
fn fit(values: &[Cx], d: usize, radius: f64) -> Vec<Cx> {
    let m = values.len();
    let rho = NODE_FRACTION * radius;
    (0..=d)
        .map(|i| {
            let sum: Cx = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Cx::from_polar(1.0, -2.0 * PI * (i * j) as f64 / m as f64))
                .sum();
            sum / (m as f64 * rho.powi(i as i32))
        })
        .collect()
}

fn check_angles(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return precondition(format!("n_angles must be a power of two ≥ 2, got {n}"));
    }
    Ok(())
}

/// `f_0(s, z) = (γ_{t,0}(s), z)`: constant disks over the seed loop, on
/// `|z| < r` with `r` the filtration radius.
pub fn torus_seed(params: &HenonParams, loop0: &LoopSample, n_angles: usize, d: usize) -> Result<SolidTorus> {
    check_angles(n_angles)?;
    if loop0.len() != n_angles {
        return precondition(format!("seed loop has {} samples, expected {n_angles}", loop0.len()));
    }
    if d == 0 {
        return precondition("disk degree must be ≥ 1");
    }
    let coeffs = loop0
        .values
        .iter()
        .map(|&g| {
            let mut c = vec![Cx::new(0.0, 0.0); d + 1];
            c[0] = g;
            c
        })
        .collect();
    Ok(SolidTorus { n_angles, disk_degree: d, coeffs, level: 0, radius: params.filtration_radius(), node_residual: 0.0 })
}

/// Solve `x² + c + a z = φ(a x)` by Newton from `seed`.
fn solve_node(params: &HenonParams, target: &[Cx], z: Cx, seed: Cx) -> Option<(Cx, f64)> {
    let (a, c) = (params.a, params.c);
    let mut x = seed;
    for _ in 0..NEWTON_STEPS {
        let (phi, dphi) = horner_with_derivative(target, a * x);
        let f = x * x + c + a * z - phi;
        let df = x * 2.0 - a * dphi;
        if df.norm() == 0.0 || !f.re.is_finite() || !f.im.is_finite() {
            return None;
        }
        let dx = f / df;
        x -= dx;
        if dx.norm() <= 1e-14 * (1.0 + x.norm()) {
            let residual = (x * x + c + a * z - horner(target, a * x)).norm();
            return Some((x, residual));
        }
    }
    None
}

/// One graph-transform step: the disk at `s` is the component of
/// `H⁻¹(disk at 2s)` continuing the one-dimensional preimage branch, refit
/// on the collocation nodes.
pub fn graph_transform(params: &HenonParams, torus: &SolidTorus) -> Result<SolidTorus> {
    if params.a.norm() == 0.0 {
        return precondition("graph transform needs a ≠ 0");
    }
    let n = torus.n_angles;
    check_angles(n)?;
    let d = torus.disk_degree;
    let nodes = torus.nodes();
    let zero = Cx::new(0.0, 0.0);

    let seeds: Vec<Cx> = (0..n).map(|k| (torus.coeffs[(2 * k) % n][0] - params.c).sqrt()).collect();
    let seeds = stitch_roots(&seeds)?;
    let centers: Vec<Cx> = seeds
        .par_iter()
        .enumerate()
        .map(|(k, &seed)| {
            solve_node(params, &torus.coeffs[(2 * k) % n], zero, seed)
                .map(|r| r.0)
                .ok_or_else(|| Error::NewtonFailed { s: k as f64 / n as f64, z: format!("{zero}") })
        })
        .collect::<Result<_>>()?;
    let half = n / 2;
    for k in 0..half {
        let gap = (centers[k] - centers[k + half]).norm();
        if gap < 1e-6 * (centers[k].norm() + centers[k + half].norm()) {
            return Err(Error::ResolutionTooCoarse);
        }
    }

    let solved: Vec<(Vec<Cx>, f64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let target = &torus.coeffs[(2 * k) % n];
            let x0 = centers[k];
            let mut values = Vec::with_capacity(nodes.len());
            let mut worst: f64 = 0.0;
            for &z in &nodes {
                let seed = x0 - params.a * z / (x0 * 2.0);
                let (x, res) = solve_node(params, target, z, seed)
                    .ok_or_else(|| Error::NewtonFailed { s: k as f64 / n as f64, z: format!("{z}") })?;
                values.push(x);
                worst = worst.max(res);
            }
            Ok((values, worst))
        })
        .collect::<Result<_>>()?;

    for k in 0..half {
        for j in 0..nodes.len() {
            let (u, v) = (solved[k].0[j], solved[k + half].0[j]);
            if (u - v).norm() < 1e-6 * (u.norm() + v.norm()) {
                return Err(Error::ResolutionTooCoarse);
            }
        }
    }

    let node_residual = solved.iter().map(|s| s.1).fold(0.0, f64::max);
    let coeffs = solved.iter().map(|(values, _)| fit(values, d, torus.radius)).collect();
    Ok(SolidTorus { coeffs, level: torus.level + 1, node_residual, ..torus.clone() })
}

/// Output of [`torus_fixed_point`].
#[derive(Clone, Debug)]
pub struct FixedPointRun {
    pub torus: SolidTorus,
    /// `sup |f_m − f_{m−1}|` for `m = 1..=n_iters`.
    pub gaps: Vec<f64>,
    /// Separation after each iteration.
    pub separations: Vec<f64>,
    /// The one-dimensional loop `γ_{t,n}` with the same number of pullbacks.
    pub loop_curve: LoopSample,
    /// `sup_{s,z} |φ_s(z) − γ_t(s) + a z/(2γ_t(s))|` over the probe points.
    pub phi_oa2_residual: f64,
}

impl FixedPointRun {
    pub fn final_gap(&self) -> f64 {
        self.gaps.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// `n_iters` graph transforms of the seed built from the level-`log 2`
/// equipotential.
pub fn torus_fixed_point(params: &HenonParams, n_iters: usize, n_angles: usize, d: usize) -> Result<FixedPointRun> {
    torus_fixed_point_tol(params, n_iters, n_angles, d, 0.0)
}

/// Like [`torus_fixed_point`], stopping early once the gap is below `tol`.
pub fn torus_fixed_point_tol(params: &HenonParams, max_iters: usize, n_angles: usize, d: usize, tol: f64) -> Result<FixedPointRun> {
    if max_iters == 0 {
        return precondition("torus_fixed_point needs n_iters ≥ 1");
    }
    check_angles(n_angles)?;
    let base = base_loop(&params.poly, n_angles)?;
    let mut torus = torus_seed(params, &base, n_angles, d)?;
    let mut loop_curve = base;
    let mut gaps = Vec::with_capacity(max_iters);
    let mut separations = Vec::with_capacity(max_iters);
    for _ in 0..max_iters {
        let next = graph_transform(params, &torus)?;
        gaps.push(next.sup_distance(&torus));
        separations.push(next.separation());
        torus = next;
        loop_curve = pullback_loop(&params.poly, &loop_curve)?;
        if gaps.last().is_some_and(|&g| g < tol) {
            break;
        }
    }
    let phi_oa2_residual = phi_oa2_residual(params, &torus, &loop_curve);
    Ok(FixedPointRun { torus, gaps, separations, loop_curve, phi_oa2_residual })
}

/// `sup_{s,z} |φ_s(z) − γ(s) + a z/(2γ(s))|` over center and nodes.
pub fn phi_oa2_residual(params: &HenonParams, torus: &SolidTorus, loop_curve: &LoopSample) -> f64 {
    let probes = torus.probes();
    (0..torus.n_angles)
        .into_par_iter()
        .map(|k| {
            let g = loop_curve.at(k);
            probes
                .iter()
                .map(|&z| (torus.eval(k, z) - g + params.a * z / (g * 2.0)).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `σ(s, z) = (2s mod 1, a φ_s(z))`.
pub fn sigma(params: &HenonParams, fstar: &SolidTorus, (s, z): (f64, Cx)) -> Result<(f64, Cx)> {
    let z1 = params.a * fstar.eval_angle(s, z);
    if z1.norm() >= fstar.radius {
        return Err(Error::ImageLeftDisk);
    }
    Ok(((2.0 * s).rem_euclid(1.0), z1))
}

/// `f*(s, z) = (φ_s(z), z)`.
pub fn embed(fstar: &SolidTorus, (s, z): (f64, Cx)) -> Point {
    (fstar.eval_angle(s, z), z)
}

/// Seeds `(frac(j·g), 0)` with `g` the golden ratio conjugate, spreading
/// angles off the dyadic grid so doubling orbits do not collapse.
pub fn golden_seeds(count: usize) -> Vec<(f64, Cx)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    (0..count).map(|j| ((j as f64 * g).fract(), Cx::new(0.0, 0.0))).collect()
}

/// Points `f*(σ^m(seed))` for `m = 1..=depth`.
pub fn julia_from_sigma(params: &HenonParams, fstar: &SolidTorus, depth: usize, seeds: &[(f64, Cx)]) -> Result<PointCloud> {
    let points: Vec<Vec<Point>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut out = Vec::with_capacity(depth);
            let mut cur = seed;
            for _ in 0..depth {
                cur = sigma(params, fstar, cur)?;
                out.push(embed(fstar, cur));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let meta = format!("julia_from_sigma depth={depth} seeds={}", seeds.len());
    Ok(PointCloud::new(points.into_iter().flatten().collect(), meta))
}

/// `sup dist(H(f*(s,z)), f*(σ(s,z)))` over grid angles and `|z| ≤ 0.9r`.
pub fn semiconjugacy_residual(params: &HenonParams, fstar: &SolidTorus, sample_count: usize) -> Result<f64> {
    let n = fstar.n_angles;
    let rho = NODE_FRACTION * fstar.radius;
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    (0..sample_count)
        .into_par_iter()
        .map(|i| {
            let k = (i * 7919) % n;
            let s = k as f64 / n as f64;
            let r = rho * ((i as f64 + 0.5) / sample_count as f64).sqrt();
            let z = Cx::from_polar(r, 2.0 * PI * (i as f64 * golden).fract());
            let lhs = params.apply(embed(fstar, (s, z)));
            let rhs = embed(fstar, sigma(params, fstar, (s, z))?);
            Ok((lhs.0 - rhs.0).norm().max((lhs.1 - rhs.1).norm()))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `ψ_t(ζ, z) = (p_t(ζ), εζ − ε² z/(2ζ))`.
pub fn model_psi(params: &HenonParams, eps: f64, (zeta, z): Point) -> Result<Point> {
    if zeta.norm() == 0.0 {
        return precondition("model map needs ζ ≠ 0");
    }
    Ok((params.poly.eval(zeta), zeta * eps - z * (eps * eps) / (zeta * 2.0)))
}

/// Iterate `ψ_t` from `(ζ, 0)` for each `ζ` on `J_{p_t}`, emitting the
/// `depth` images mapped to Hénon coordinates by `(ζ, z) ↦ (ζ − εz/(2ζ), z)`.
pub fn model_cloud(params: &HenonParams, eps: f64, julia: &[Cx], depth: usize) -> Result<PointCloud> {
    let mut points = Vec::with_capacity(julia.len() * depth);
    for &zeta in julia {
        let mut cur = (zeta, Cx::new(0.0, 0.0));
        for _ in 0..depth {
            cur = model_psi(params, eps, cur)?;
            points.push((cur.0 - cur.1 * eps / (cur.0 * 2.0), cur.1));
        }
    }
    Ok(PointCloud::new(points, format!("model_psi eps={eps} depth={depth}")))
}
