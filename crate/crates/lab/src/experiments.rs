//! Continuity, connectivity and radial-convergence experiments.

use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use semipar::henon::{jplus_slice, make_params, HenonParams, PointCloud, Window};
use semipar::poly1d::{caratheodory, PolyParams, Rotation};
use semipar::torus::{golden_seeds, julia_from_sigma, torus_fixed_point_tol, FixedPointRun};

use crate::error::{LabError, LabResult};
use crate::hausdorff::hausdorff;

/// Hausdorff distances from clouds at each `t` to the `t = 0` reference.
#[derive(Clone, Debug, PartialEq)]
pub struct HausdorffResult {
    pub t_values: Vec<f64>,
    pub distances: Vec<f64>,
    pub resolution: String,
}

impl HausdorffResult {
    pub fn strictly_decreasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[1] < w[0])
    }
}

/// Grid sizes and stopping rules shared by the experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolution {
    /// Angles on the solid torus or loop grid.
    pub n_angles: usize,
    /// Chebyshev-like degree of each disk.
    pub degree: usize,
    /// Maximum graph-transform or pullback iterations.
    pub iters: usize,
    /// Early stop once the Cauchy gap falls below this.
    pub tol: f64,
    /// Golden-ratio seeds for the `J` cloud.
    pub seeds: usize,
    /// Orbit depth per seed.
    pub depth: usize,
    /// Pixels per side of the `J⁺` slice.
    pub slice_res: usize,
    /// Escape-time cap on the slice.
    pub escape_iter: u32,
    /// Half width of the slice window around `x = 0`.
    pub half_width: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            n_angles: 2048,
            degree: 8,
            iters: 400,
            tol: 1e-6,
            seeds: 1000,
            depth: 3,
            slice_res: 256,
            escape_iter: 400,
            half_width: 1.6,
        }
    }
}

impl Resolution {
    fn describe(&self) -> String {
        format!(
            "angles={} degree={} iters={} tol={:e} seeds={} depth={} slice_res={} escape_iter={} half_width={}",
            self.n_angles,
            self.degree,
            self.iters,
            self.tol,
            self.seeds,
            self.depth,
            self.slice_res,
            self.escape_iter,
            self.half_width
        )
    }
}

fn check_t_list(t_list: &[f64]) -> LabResult<()> {
    if t_list.is_empty() {
        return Err(LabError::Config("t list is empty".into()));
    }
    let sign = t_list[0].signum();
    let ok = t_list.iter().all(|t| t.is_finite() && *t != 0.0 && t.signum() == sign)
        && t_list.windows(2).all(|w| w[1].abs() < w[0].abs());
    if ok {
        Ok(())
    } else {
        Err(LabError::Config("t list must decrease to 0 in absolute value with one sign".into()))
    }
}

/// Converged solid torus at the given resolution.
pub fn torus_run(params: &HenonParams, res: &Resolution) -> LabResult<FixedPointRun> {
    Ok(torus_fixed_point_tol(params, res.iters, res.n_angles, res.degree, res.tol)?)
}

/// Sample of `J` from the fixed point of the graph transform.
pub fn julia_cloud(params: &HenonParams, res: &Resolution) -> LabResult<PointCloud> {
    let run = torus_run(params, res)?;
    Ok(julia_from_sigma(params, &run.torus, res.depth, &golden_seeds(res.seeds))?)
}

/// Boundary pixels of the escape picture of `J⁺ ∩ {y = 0}`.
pub fn jplus_cloud(params: &HenonParams, res: &Resolution) -> LabResult<PointCloud> {
    let window = Window { center: Cx::new(0.0, 0.0), half_width: res.half_width, y: Cx::new(0.0, 0.0) };
    let grid = jplus_slice(params, window, res.slice_res, res.escape_iter)?;
    Ok(grid.boundary_cloud())
}

fn distances(
    t_list: &[f64],
    reference: &PointCloud,
    build: impl Fn(f64) -> LabResult<PointCloud> + Sync,
) -> LabResult<Vec<f64>> {
    t_list.par_iter().map(|&t| hausdorff(&build(t)?, reference)).collect()
}

/// Distances `d_H(J_t, J_0)` and `d_H(J⁺_t ∩ {y=0}, J⁺_0 ∩ {y=0})`.
pub fn continuity_experiment(
    rotation: Rotation,
    a: Cx,
    t_list: &[f64],
    res: &Resolution,
) -> LabResult<(HausdorffResult, HausdorffResult)> {
    check_t_list(t_list)?;
    let params = |t: f64| make_params(rotation, t, a).map_err(LabError::from);
    let p0 = params(0.0)?;
    let (j0, jp0) = rayon::join(|| julia_cloud(&p0, res), || jplus_cloud(&p0, res));
    let (j0, jp0) = (j0?, jp0?);
    let dj = distances(t_list, &j0, |t| julia_cloud(&params(t)?, res))?;
    let djp = distances(t_list, &jp0, |t| jplus_cloud(&params(t)?, res))?;
    let meta = res.describe();
    Ok((
        HausdorffResult { t_values: t_list.to_vec(), distances: dj, resolution: meta.clone() },
        HausdorffResult { t_values: t_list.to_vec(), distances: djp, resolution: meta },
    ))
}

/// `J_t` from the Carathéodory loop, embedded as `(γ(s), 0)`.
pub fn radial_cloud(rotation: Rotation, t: f64, n_angles: usize, iters: usize) -> LabResult<PointCloud> {
    let poly = PolyParams::new(rotation, t);
    let cara = caratheodory(&poly, n_angles, iters)?;
    let zero = Cx::new(0.0, 0.0);
    let points = cara.curve.values.iter().map(|&g| (g, zero)).collect();
    Ok(PointCloud::new(points, format!("caratheodory t={t} N={n_angles} iters={iters}")))
}

/// Distances `d_H(J_{p_t}, J_{p_0})` between Carathéodory images.
pub fn radial_demo(rotation: Rotation, t_list: &[f64], n_angles: usize, iters: usize) -> LabResult<HausdorffResult> {
    if t_list.is_empty() {
        return Err(LabError::Config("t list is empty".into()));
    }
    let reference = radial_cloud(rotation, 0.0, n_angles, iters)?;
    let distances = distances(t_list, &reference, |t| radial_cloud(rotation, t, n_angles, iters))?;
    Ok(HausdorffResult {
        t_values: t_list.to_vec(),
        distances,
        resolution: format!("angles={n_angles} iters={iters}"),
    })
}

/// Outcome of one parameter cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    ConnectedByConstruction,
    Unknown,
}

impl std::fmt::Display for Connectivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Connectivity::ConnectedByConstruction => "CONNECTED-BY-CONSTRUCTION",
            Connectivity::Unknown => "UNKNOWN",
        })
    }
}

/// One cell of a connectivity scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectivityCell {
    pub a: Cx,
    pub verdict: Connectivity,
    pub final_gap: f64,
    pub min_separation: f64,
}

/// Verdicts on a `res × res` grid of `a` in a square window, row-major with
/// row 0 at the top.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectivityGrid {
    pub t: f64,
    pub center: Cx,
    pub half_width: f64,
    pub res: usize,
    pub cells: Vec<ConnectivityCell>,
}

impl ConnectivityGrid {
    pub fn get(&self, i: usize, j: usize) -> &ConnectivityCell {
        &self.cells[j * self.res + i]
    }
}

/// Smallest branch separation accepted as intact.
pub const MIN_SEPARATION: f64 = 1e-3;

fn classify(rotation: Rotation, t: f64, a: Cx, res: &Resolution) -> ConnectivityCell {
    let unknown = |gap: f64, sep: f64| ConnectivityCell { a, verdict: Connectivity::Unknown, final_gap: gap, min_separation: sep };
    if a.norm() == 0.0 || a.norm() >= 0.5 {
        return unknown(f64::NAN, f64::NAN);
    }
    let Ok(params) = make_params(rotation, t, a) else {
        return unknown(f64::NAN, f64::NAN);
    };
    let Ok(run) = torus_run(&params, res) else {
        return unknown(f64::NAN, f64::NAN);
    };
    let gap = run.final_gap();
    let sep = run.separations.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = gap < res.tol && sep > MIN_SEPARATION;
    if ok {
        ConnectivityCell { a, verdict: Connectivity::ConnectedByConstruction, final_gap: gap, min_separation: sep }
    } else {
        unknown(gap, sep)
    }
}

/// Constructive connectivity verdicts over a window of `a` values.
pub fn connectivity_scan(
    rotation: Rotation,
    t: f64,
    center: Cx,
    half_width: f64,
    grid_res: usize,
    res: &Resolution,
) -> LabResult<ConnectivityGrid> {
    if grid_res == 0 || half_width.is_nan() || half_width <= 0.0 {
        return Err(LabError::Config("scan needs res ≥ 1 and a positive window".into()));
    }
    if center.norm() + half_width * std::f64::consts::SQRT_2 >= 0.5 + 1e-12 {
        return Err(LabError::Config("a-window must lie inside |a| < 1/2".into()));
    }
    let window = Window { center, half_width, y: Cx::new(0.0, 0.0) };
    let cells = (0..grid_res * grid_res)
        .into_par_iter()
        .map(|idx| classify(rotation, t, window.cell(idx % grid_res, idx / grid_res, grid_res), res))
        .collect();
    Ok(ConnectivityGrid { t, center, half_width, res: grid_res, cells })
}
