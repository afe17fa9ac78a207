use std::f64::consts::PI;

use proptest::prelude::*;
use semipar::poly1d::*;
use semipar::Cx;

fn rot(p: u32, q: u32) -> Rotation {
    Rotation::new(p, q).unwrap()
}

fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

#[test]
fn family_constants() {
    let p = PolyParams::new(rot(0, 1), 0.0);
    assert_eq!(p.c, cx(0.25, 0.0));
    assert_eq!(p.alpha, cx(0.5, 0.0));
    let p = PolyParams::new(rot(1, 2), 0.0);
    assert_eq!(p.c, cx(-0.75, 0.0));
    assert_eq!(p.alpha, cx(-0.5, 0.0));
}

#[test]
fn green_of_z_squared() {
    let p = PolyParams::new(rot(0, 1), 0.0);
    let zero_c = PolyParams { c: cx(0.0, 0.0), ..p };
    assert!((green(&zero_c, cx(2.0, 0.0), 60) - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn green_vanishes_at_parabolic_point() {
    let p = PolyParams::new(rot(0, 1), 0.0);
    assert_eq!(green(&p, cx(0.5, 0.0), 200), 0.0);
}

#[test]
fn green_is_stable_in_iteration_count() {
    let p = PolyParams::new(rot(0, 1), 0.0);
    let oracle = green(&p, cx(2.0, 0.0), 60);
    assert!(oracle > 0.55 && oracle < 0.75, "G(2) = {oracle}");
    for iters in 40..=60 {
        assert!((green(&p, cx(2.0, 0.0), iters) - oracle).abs() < 1e-8);
    }
}

#[test]
fn pullback_of_circle_under_z_squared() {
    let p = PolyParams { c: cx(0.0, 0.0), ..PolyParams::new(rot(0, 1), 0.0) };
    let out = pullback_loop(&p, &LoopSample::circle(1024, 4.0, 1.0)).unwrap();
    let expect = LoopSample::circle(1024, 2.0, 0.5);
    assert!(out.sup_distance(&expect) < 1e-12);
    assert_eq!(out.level, 0.5);
}

#[test]
fn pullback_satisfies_defining_equation() {
    let p = PolyParams::new(rot(0, 1), 0.0);
    let curve = base_loop(&p, 1024).unwrap();
    let out = pullback_loop(&p, &curve).unwrap();
    let n = curve.len();
    for k in 0..n {
        assert!((p.eval(out.at(k)) - curve.at(2 * k % n)).norm() < 1e-12);
    }
}

#[test]
fn pullback_rejects_bad_grids() {
    let p = PolyParams::new(rot(1, 3), 0.0);
    assert!(pullback_loop(&p, &LoopSample::circle(1000, 4.0, 1.0)).unwrap_err().is_precondition());
    assert!(pullback_loop(&p, &LoopSample::circle(4, 4.0, 1.0)).unwrap_err().is_precondition());
    assert!(pullback_loop(&p, &LoopSample::circle(1024, 4.0, 0.0)).unwrap_err().is_precondition());
}

#[test]
fn basilica_gaps_decrease() {
    let p = PolyParams::new(rot(1, 2), 0.0);
    let run = caratheodory(&p, 2048, 20).unwrap();
    for w in run.gaps.windows(2) {
        assert!(w[1] < w[0], "gaps {:?}", run.gaps);
    }
}

#[test]
fn caratheodory_of_z_squared_is_unit_circle() {
    let p = PolyParams { c: cx(0.0, 0.0), ..PolyParams::new(rot(0, 1), 0.0) };
    let run = caratheodory(&p, 1024, 40).unwrap();
    assert!(run.curve.sup_distance(&LoopSample::circle(1024, 1.0, 0.0)) < 1e-10);
}

#[test]
fn caratheodory_ray_zero_lands_at_parabolic_point() {
    // Parabolic landing is O(1/n): the gap to 1/2 halves when n doubles.
    let p = PolyParams::new(rot(0, 1), 0.0);
    let miss = |n| (caratheodory(&p, 4096, n).unwrap().curve.at(0) - cx(0.5, 0.0)).norm();
    let (m40, m80, m160) = (miss(40), miss(80), miss(160));
    assert!(m40 < 3e-2, "n=40 miss {m40}");
    assert!(m160 < 1e-2, "n=160 miss {m160}");
    for ratio in [m80 / m40, m160 / m80] {
        assert!(ratio > 0.4 && ratio < 0.6, "ratio {ratio}");
    }
}

#[test]
fn caratheodory_chebyshev_segment() {
    // λ = −2 gives c = −2, whose Julia set is [−2, 2].
    let p = PolyParams::new(rot(1, 2), 1.0);
    assert!((p.c - cx(-2.0, 0.0)).norm() < 1e-15);
    let run = caratheodory(&p, 4096, 30).unwrap();
    let to_segment = run
        .curve
        .values
        .iter()
        .map(|z| (cx(z.re.clamp(-2.0, 2.0), 0.0) - z).norm())
        .fold(0.0, f64::max);
    let from_segment = (0..=400)
        .map(|i| {
            let x = cx(-2.0 + 4.0 * i as f64 / 400.0, 0.0);
            run.curve.values.iter().map(|z| (z - x).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    assert!(to_segment.max(from_segment) < 1e-2, "{to_segment} {from_segment}");
}

#[test]
fn caratheodory_preconditions() {
    let p = PolyParams::new(rot(0, 1), 0.0);
    assert!(caratheodory(&p, 512, 10).unwrap_err().is_precondition());
    assert!(caratheodory(&p, 1024, 0).unwrap_err().is_precondition());
}

fn check_loop_invariants(p: &PolyParams) {
    let run = caratheodory(p, 2048, 40).unwrap();
    for w in run.gaps[5..].windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-9), "t={} gaps not monotone: {:?}", p.t, run.gaps);
    }
    let n = run.curve.len();
    let defect = (0..n)
        .map(|k| (p.eval(run.curve.at(k)) - run.curve.at(2 * k % n)).norm())
        .fold(0.0, f64::max);
    assert!(defect < 10.0 * run.final_gap(), "t={} defect {defect} gap {}", p.t, run.final_gap());
}

#[test]
fn loop_invariants_across_family() {
    for (pq, t) in [((0, 1), 0.0), ((0, 1), 0.05), ((0, 1), -0.05), ((1, 2), 0.0), ((1, 2), 0.1), ((1, 3), 0.05)] {
        check_loop_invariants(&PolyParams::new(rot(pq.0, pq.1), t));
    }
}

#[test]
fn normal_form_parabolic_q1_is_already_normal() {
    let nf = normal_form_1d(&PolyParams::new(rot(0, 1), 0.0), 6).unwrap();
    let expect = [0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    for (k, e) in expect.iter().enumerate() {
        assert!((nf.normal[k] - cx(*e, 0.0)).norm() < 1e-12, "k={k}: {}", nf.normal[k]);
    }
    assert!(nf.c_coef.norm() < 1e-12);
}

#[test]
fn normal_form_basilica() {
    let p = PolyParams::new(rot(1, 2), 0.0);
    let nf = normal_form_1d(&p, 8).unwrap();
    assert!(nf.normal[2].norm() < 1e-12);
    assert!((nf.normal[3] - p.lambda).norm() < 1e-12);
    // First elimination step by hand: b = a₂/(λ − λ²) = 1/(−1 − 1) = −1/2.
    let b = 1.0 / (p.lambda - p.lambda * p.lambda);
    assert!((b - cx(-0.5, 0.0)).norm() < 1e-15);
}

fn forbidden_max(nf: &NormalForm1D, q: usize) -> f64 {
    (2..=2 * q + 1).filter(|k| (k - 1) % q != 0).map(|k| nf.normal[k].norm()).fold(0.0, f64::max)
}

#[test]
fn normal_form_conjugacy_and_kill_list() {
    for (pq, t) in [((0, 1), 0.0), ((1, 2), 0.0), ((1, 3), 0.0), ((0, 1), 0.05), ((1, 2), -0.02), ((2, 5), 0.01)] {
        let p = PolyParams::new(rot(pq.0, pq.1), t);
        let q = p.q() as usize;
        let order = 2 * q + 3;
        let nf = normal_form_1d(&p, order).unwrap();
        assert!(forbidden_max(&nf, q) < 1e-10);
        assert!((nf.normal[q + 1] - p.lambda).norm() < 1e-10);
        assert!((nf.normal[1] - p.lambda).norm() < 1e-12);
        let lhs = nf.change.compose(&p.recentered(order)).unwrap();
        let rhs = nf.normal.compose(&nf.change).unwrap();
        let residual = (&lhs - &rhs).max_abs();
        assert!(residual < 1e-10, "{pq:?} t={t}: residual {residual}");
        assert!((nf.c_coef - nf.normal[2 * q + 1] / p.lambda).norm() < 1e-15);
    }
}

#[test]
fn normal_form_requires_order() {
    assert!(normal_form_1d(&PolyParams::new(rot(1, 2), 0.0), 5).unwrap_err().is_precondition());
}

#[test]
fn sector_examples() {
    let p1 = PolyParams::new(rot(0, 1), 0.0);
    assert_eq!(sector_1d(&p1, cx(0.1, 0.0)), Sector::Repelling);
    assert_eq!(sector_1d(&p1, cx(0.0, 0.1)), Sector::Attracting);
    assert_eq!(sector_1d(&p1, cx(0.2, 0.0)), Sector::Outside);
    let p2 = PolyParams::new(rot(1, 2), -0.01);
    let r = inner_radius(2, -0.01);
    assert!((r - 0.01 / ((2.0 + 1.0 / 3.0) * (2.0 * PI / 9.0).sin())).abs() < 1e-15);
    assert!((r - 0.006667).abs() < 1e-5);
    assert_eq!(sector_1d(&p2, cx(0.004f64.sqrt(), 0.0)), Sector::Attracting);
    assert_eq!(sector_1d(&p2, cx(0.01f64.sqrt(), 0.0)), Sector::Repelling);
}

#[test]
fn sector_constants() {
    assert!((eps0() - (2.0 * PI / 9.0).tan()).abs() < 1e-15);
    assert!((eps1() - 0.6427876097).abs() < 1e-10);
    assert!(eps1() > 0.6);
    assert_eq!(eps2(3), 1.0 / 64.0);
}

#[test]
fn derivative_expansion_on_repelling_sector() {
    let eps1 = eps1();
    for (pq, t) in [((0, 1), 0.0), ((0, 1), 0.05), ((1, 2), 0.0)] {
        let p = PolyParams::new(rot(pq.0, pq.1), t);
        let q = p.q() as i32;
        let nf = normal_form_1d(&p, 2 * q as usize + 2).unwrap();
        let deriv = nf.normal.derivative();
        let mut checked = 0;
        for i in 0..1000 {
            let r = 0.15 * ((i as f64 + 0.5) / 1000.0).sqrt();
            let x = Cx::from_polar(r, 2.0 * PI * (i as f64 * 0.618_033_988_749_895).fract());
            if sector_1d(&p, x) != Sector::Repelling {
                continue;
            }
            checked += 1;
            let bound = p.lambda.norm() * (1.0 + (q as f64 + 0.5) * eps1 * x.norm().powi(q));
            assert!(deriv.eval(x).norm() > bound, "{pq:?} t={t} x={x}");
        }
        assert!(checked > 100);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_point_and_multiplier(q in 1u32..7, p_raw in 0u32..7, t in -0.08..0.08f64) {
        let p = (0..=q).map(|k| (p_raw + k) % (q + 1)).find(|&p| {
            let (mut a, mut b) = (p, q);
            while b != 0 { (a, b) = (b, a % b); }
            a == 1
        }).unwrap();
        let params = PolyParams::new(rot(p, q), t);
        prop_assert!((params.eval(params.alpha) - params.alpha).norm() < 1e-12);
        prop_assert!((params.deriv(params.alpha) - params.lambda).norm() < 1e-12);
        prop_assert!((params.c - (params.lambda / 2.0 - params.lambda * params.lambda / 4.0)).norm() < 1e-15);
    }

    #[test]
    fn pullback_output_is_a_preimage(t in -0.1..0.1f64, q in 1u32..4) {
        let params = PolyParams::new(rot(if q == 1 { 0 } else { 1 }, q), t);
        let curve = base_loop(&params, 1024).unwrap();
        let out = pullback_loop(&params, &curve).unwrap();
        for k in (0..1024).step_by(37) {
            prop_assert!((params.eval(out.at(k)) - curve.at(2 * k % 1024)).norm() < 1e-12);
        }
        prop_assert_eq!(out.level, curve.level / 2.0);
    }
}
