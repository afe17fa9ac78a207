//! One function per command; every output is a function of the config alone.

use std::fs;

use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use semipar::cones::{
    global_cone_check, hyperbolicity_scan, local_cone_check, sector_samples, ConeReport, ScanConfig, Verdict, VSpec,
};
use semipar::henon::{make_params, HenonParams};
use semipar::normalform2d::{conjugacy_residual, petal_check, reduce, PetalConfig, LOCAL_HEIGHT};
use semipar::poly1d::{caratheodory, normal_form_1d, PolyParams};
use semipar::series::TruncSeries2;
use semipar::torus::{semiconjugacy_residual, torus_fixed_point};

use crate::config::{format_complex, Command, RunConfig};
use crate::error::{LabError, LabResult};
use crate::experiments::{connectivity_scan, continuity_experiment, radial_demo, Connectivity, Resolution};
use crate::output::{write_pgm, write_ppm, Table};

/// Smallest `|x|` used when sampling the local sector.
pub const MIN_ABS_X: f64 = 1e-3;
/// Pixels per side of one scan cell in emitted images.
pub const CELL_PIXELS: usize = 16;

fn num(x: f64) -> String {
    x.to_string()
}

fn cx(z: Cx) -> String {
    format_complex(z)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn grid(cfg: &RunConfig) -> Vec<(f64, Cx)> {
    cfg.t.iter().flat_map(|&t| cfg.a.iter().map(move |&a| (t, a))).collect()
}

fn params(cfg: &RunConfig, t: f64, a: Cx) -> LabResult<HenonParams> {
    Ok(make_params(cfg.pq, t, a)?)
}

fn nf_order(cfg: &RunConfig) -> usize {
    cfg.degree.max(2 * cfg.pq.q() as usize + 2)
}

/// Execute `cfg` and write its tables and images into `cfg.out`.
pub fn run(cfg: &RunConfig) -> LabResult<()> {
    if cfg.t.is_empty() || cfg.a.is_empty() {
        return Err(LabError::Config("t and a lists must be non-empty".into()));
    }
    let tables = match cfg.command {
        Command::Caratheodory => caratheodory_cmd(cfg)?,
        Command::NormalForm => normal_form_cmd(cfg)?,
        Command::PetalCheck => petal_cmd(cfg)?,
        Command::ConeCheck => cone_cmd(cfg)?,
        Command::HypScan => hyp_scan_cmd(cfg)?,
        Command::TorusIterate => torus_cmd(cfg)?,
        Command::Continuity => continuity_cmd(cfg)?,
        Command::ConnectivityScan => connectivity_cmd(cfg)?,
        Command::RadialDemo => radial_cmd(cfg)?,
    };
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join("run.cfg"), cfg.to_text())?;
    for table in &tables {
        table.write(&cfg.out)?;
    }
    Ok(())
}

fn caratheodory_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    let runs = cfg
        .t
        .par_iter()
        .map(|&t| caratheodory(&PolyParams::new(cfg.pq, t), cfg.angles, cfg.iters))
        .collect::<Result<Vec<_>, _>>()?;
    let mut curve = Table::new("caratheodory", &["t", "k", "s", "re", "im"]);
    let mut gaps = Table::new("caratheodory_gaps", &["t", "iter", "gap"]);
    for (&t, run) in cfg.t.iter().zip(&runs) {
        let n = run.curve.values.len();
        for (k, g) in run.curve.values.iter().enumerate() {
            curve.push(vec![num(t), k.to_string(), num(k as f64 / n as f64), num(g.re), num(g.im)]);
        }
        for (m, gap) in run.gaps.iter().enumerate() {
            gaps.push(vec![num(t), (m + 1).to_string(), num(*gap)]);
        }
    }
    Ok(vec![curve, gaps])
}

fn push_terms(table: &mut Table, t: f64, a: Cx, component: &str, series: &TruncSeries2) {
    for (i, j, c) in series.terms() {
        if c != Cx::new(0.0, 0.0) {
            table.push(vec![num(t), cx(a), component.into(), i.to_string(), j.to_string(), num(c.re), num(c.im)]);
        }
    }
}

fn normal_form_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    let order = nf_order(cfg);
    let mut table = Table::new("normal_form", &["t", "a", "component", "i", "j", "re", "im"]);
    let mut summary = Table::new("normal_form_summary", &["t", "a", "order", "c_re", "c_im", "residual"]);
    for (t, a) in grid(cfg) {
        if a == Cx::new(0.0, 0.0) {
            let nf = normal_form_1d(&PolyParams::new(cfg.pq, t), order)?;
            for (i, c) in nf.normal.coeffs().iter().enumerate() {
                table.push(vec![num(t), cx(a), "x".into(), i.to_string(), "0".into(), num(c.re), num(c.im)]);
            }
            summary.push(vec![num(t), cx(a), order.to_string(), num(nf.c_coef.re), num(nf.c_coef.im), String::new()]);
        } else {
            let p = params(cfg, t, a)?;
            let nf = reduce(&p, order)?;
            push_terms(&mut table, t, a, "x", &nf.normal.x);
            push_terms(&mut table, t, a, "y", &nf.normal.y);
            let residual = conjugacy_residual(&p, &nf)?;
            summary.push(vec![num(t), cx(a), order.to_string(), num(nf.c_coef.re), num(nf.c_coef.im), num(residual)]);
        }
    }
    Ok(vec![table, summary])
}

fn petal_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    let pcfg = PetalConfig { samples: cfg.samples, steps: cfg.steps, tolerance: cfg.tol, seed: cfg.seed, ..Default::default() };
    let mut records = Table::new(
        "petal_check",
        &["t", "a", "index", "x_re", "x_im", "y_re", "y_im", "petal", "rotation_ok", "steps_to_target", "final_distance"],
    );
    let mut summary = Table::new(
        "petal_summary",
        &["t", "a", "petal_r", "rotation_failures", "convergence_failures", "converged_fraction", "max_image_height", "passed"],
    );
    for (t, a) in grid(cfg) {
        let p = params(cfg, t, a)?;
        let nf = reduce(&p, nf_order(cfg))?;
        let report = petal_check(&p, &nf, &pcfg)?;
        for (i, r) in report.records.iter().enumerate() {
            records.push(vec![
                num(t),
                cx(a),
                i.to_string(),
                num(r.start.0.re),
                num(r.start.0.im),
                num(r.start.1.re),
                num(r.start.1.im),
                r.petal.to_string(),
                opt(r.rotation_ok),
                opt(r.steps_to_target),
                num(r.final_distance),
            ]);
        }
        summary.push(vec![
            num(t),
            cx(a),
            num(report.petal_r),
            report.rotation_failures.to_string(),
            report.convergence_failures.to_string(),
            num(report.converged_fraction()),
            num(report.max_image_height),
            report.passed().to_string(),
        ]);
    }
    Ok(vec![records, summary])
}

const CONE_COLUMNS: [&str; 13] = [
    "t",
    "a",
    "region",
    "metric",
    "samples",
    "worst_h",
    "worst_v",
    "invariance_failures",
    "h_bound_failures",
    "min_abs_x_pow_q",
    "det_ratio_min",
    "det_ratio_max",
    "passed",
];

fn cone_row(t: f64, a: Cx, r: &ConeReport) -> Vec<String> {
    vec![
        num(t),
        cx(a),
        format!("{:?}", r.region),
        r.metric.to_string(),
        r.samples.to_string(),
        num(r.worst_h_expansion),
        num(r.worst_v_expansion),
        r.invariance_failures.len().to_string(),
        r.h_bound_failures.to_string(),
        num(r.min_abs_x_pow_q),
        num(r.det_ratio_min),
        num(r.det_ratio_max),
        r.passed().to_string(),
    ]
}

fn cone_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    let spec = VSpec { seed: cfg.seed, ..Default::default() };
    let mut table = Table::new("cone_check", &CONE_COLUMNS);
    for (t, a) in grid(cfg) {
        let p = params(cfg, t, a)?;
        let nf = reduce(&p, nf_order(cfg))?;
        let samples = sector_samples(&p, cfg.samples, MIN_ABS_X, LOCAL_HEIGHT, cfg.seed);
        table.push(cone_row(t, a, &local_cone_check(&p, &nf, &samples)?));
        if a != Cx::new(0.0, 0.0) {
            table.push(cone_row(t, a, &global_cone_check(&p, &spec, cfg.samples)?));
        }
    }
    Ok(vec![table])
}

fn verdict_gray(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 255,
        Verdict::Marginal => 170,
        Verdict::Fail => 85,
        Verdict::Excluded => 0,
    }
}

fn upscale<T: Copy>(cells: &[T], cols: usize, rows: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(cells.len() * CELL_PIXELS * CELL_PIXELS);
    for j in 0..rows * CELL_PIXELS {
        for i in 0..cols * CELL_PIXELS {
            out.push(cells[(j / CELL_PIXELS) * cols + i / CELL_PIXELS]);
        }
    }
    out
}

fn hyp_scan_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    if cfg.a.iter().any(|a| a.im != 0.0) {
        return Err(LabError::Config("hyp-scan takes real a values".into()));
    }
    let a_values: Vec<f64> = cfg.a.iter().map(|a| a.re).collect();
    let scan_cfg = ScanConfig {
        local_samples: cfg.samples,
        global_samples: cfg.samples,
        min_abs_x: MIN_ABS_X,
        spec: VSpec { seed: cfg.seed, ..Default::default() },
    };
    let cells = hyperbolicity_scan(cfg.pq, &cfg.t, &a_values, &scan_cfg);
    let mut table = Table::new("hyp_scan", &["t", "a", "verdict", "margin", "local_h", "local_v", "global_h", "global_v"]);
    for c in &cells {
        let field = |r: &Option<ConeReport>, h: bool| {
            opt(r.as_ref().map(|r| if h { r.worst_h_expansion } else { r.worst_v_expansion }))
        };
        table.push(vec![
            num(c.t),
            num(c.a),
            c.verdict.to_string(),
            num(c.margin),
            field(&c.local, true),
            field(&c.local, false),
            field(&c.global, true),
            field(&c.global, false),
        ]);
    }
    let grays: Vec<u8> = cells.iter().map(|c| verdict_gray(c.verdict)).collect();
    let (cols, rows) = (a_values.len(), cfg.t.len());
    fs::create_dir_all(&cfg.out)?;
    write_pgm(&cfg.out.join("hyp_scan.pgm"), cols * CELL_PIXELS, rows * CELL_PIXELS, &upscale(&grays, cols, rows))?;
    Ok(vec![table])
}

fn torus_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    let p = params(cfg, cfg.first_t()?, cfg.first_a()?)?;
    let run = torus_fixed_point(&p, cfg.iters, cfg.angles, cfg.degree)?;
    let mut gaps = Table::new("torus_gaps", &["iter", "gap", "separation"]);
    for (m, (g, s)) in run.gaps.iter().zip(&run.separations).enumerate() {
        gaps.push(vec![(m + 1).to_string(), num(*g), num(*s)]);
    }
    let mut disks = Table::new("torus_disks", &["k", "i", "re", "im"]);
    for (k, row) in run.torus.coeffs.iter().enumerate() {
        for (i, c) in row.iter().enumerate() {
            disks.push(vec![k.to_string(), i.to_string(), num(c.re), num(c.im)]);
        }
    }
    let semi = semiconjugacy_residual(&p, &run.torus, cfg.samples)?;
    let mut summary = Table::new(
        "torus_summary",
        &["t", "a", "final_gap", "semiconjugacy_residual", "phi_oa2_residual", "node_residual", "separation", "max_slope"],
    );
    summary.push(vec![
        num(p.t),
        cx(p.a),
        num(run.final_gap()),
        num(semi),
        num(run.phi_oa2_residual),
        num(run.torus.node_residual),
        num(run.torus.separation()),
        num(run.torus.max_slope()),
    ]);
    Ok(vec![gaps, disks, summary])
}

/// Experiment resolution derived from a config.
pub fn resolution(cfg: &RunConfig) -> Resolution {
    Resolution {
        n_angles: cfg.angles,
        degree: cfg.degree,
        iters: cfg.iters,
        tol: cfg.tol,
        seeds: cfg.samples,
        slice_res: cfg.res,
        ..Default::default()
    }
}

fn continuity_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    let res = resolution(cfg);
    let (j, jp) = continuity_experiment(cfg.pq, cfg.first_a()?, &cfg.t, &res)?;
    let mut table = Table::new("continuity", &["set", "t", "distance", "resolution"]);
    for (name, r) in [("J", &j), ("Jplus_y0", &jp)] {
        for (t, d) in r.t_values.iter().zip(&r.distances) {
            table.push(vec![name.into(), num(*t), num(*d), r.resolution.clone()]);
        }
    }
    Ok(vec![table])
}

fn connectivity_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    let res = resolution(cfg);
    let scan = connectivity_scan(cfg.pq, cfg.first_t()?, cfg.first_a()?, cfg.window, cfg.res, &res)?;
    let mut table = Table::new("connectivity", &["i", "j", "a", "verdict", "final_gap", "min_separation"]);
    for j in 0..scan.res {
        for i in 0..scan.res {
            let c = scan.get(i, j);
            table.push(vec![
                i.to_string(),
                j.to_string(),
                cx(c.a),
                c.verdict.to_string(),
                num(c.final_gap),
                num(c.min_separation),
            ]);
        }
    }
    let colors: Vec<[u8; 3]> = scan
        .cells
        .iter()
        .map(|c| match c.verdict {
            Connectivity::ConnectedByConstruction => [20, 20, 20],
            Connectivity::Unknown => [235, 235, 235],
        })
        .collect();
    fs::create_dir_all(&cfg.out)?;
    write_ppm(
        &cfg.out.join("connectivity.ppm"),
        scan.res * CELL_PIXELS,
        scan.res * CELL_PIXELS,
        &upscale(&colors, scan.res, scan.res),
    )?;
    Ok(vec![table])
}

fn radial_cmd(cfg: &RunConfig) -> LabResult<Vec<Table>> {
    let r = radial_demo(cfg.pq, &cfg.t, cfg.angles, cfg.iters)?;
    let mut table = Table::new("radial_demo", &["t", "distance", "resolution"]);
    for (t, d) in r.t_values.iter().zip(&r.distances) {
        table.push(vec![num(*t), num(*d), r.resolution.clone()]);
    }
    Ok(vec![table])
}
