use semipar::henon::{dist, eigenvalues, make_params, HenonParams};
use semipar::normalform2d::*;
use semipar::poly1d::{normal_form_1d, PolyParams, Rotation};
use semipar::Cx;

fn rot(p: u32, q: u32) -> Rotation {
    Rotation::new(p, q).unwrap()
}

fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

fn member(p: u32, q: u32, t: f64, a: f64) -> HenonParams {
    make_params(rot(p, q), t, cx(a, 0.0)).unwrap()
}

fn default_order(params: &HenonParams) -> usize {
    2 * params.q() as usize + 4
}

#[test]
fn conjugacy_residuals() {
    for (p, q, t, a) in [(1, 1, 0.05, 0.05), (1, 2, -0.02, 0.05), (1, 3, 0.0, 0.1), (2, 5, 0.01, 0.02)] {
        let params = member(p, q, t, a);
        let nf = reduce(&params, default_order(&params)).unwrap();
        let residual = conjugacy_residual(&params, &nf).unwrap();
        assert!(residual < 1e-8, "{p}/{q} t={t} a={a}: {residual}");
    }
}

#[test]
fn normal_form_shape() {
    for (p, q, t, a) in [(1, 1, 0.05, 0.05), (1, 2, -0.02, 0.05), (1, 3, 0.02, 0.1)] {
        let params = member(p, q, t, a);
        let qq = q as usize;
        let nf = reduce(&params, default_order(&params)).unwrap();
        let x = &nf.normal.x;
        let y = &nf.normal.y;
        assert!((x.get(1, 0).unwrap() - params.lambda).norm() < 1e-12);
        assert!((x.get(qq + 1, 0).unwrap() - params.lambda).norm() < 1e-10);
        for k in 2..=2 * qq + 1 {
            if (k - 1) % qq != 0 {
                assert!(x.get(k, 0).unwrap().norm() < 1e-9, "{p}/{q}: x^{k}");
            }
        }
        // x-terms carry no y-dependence up to order 2q+1.
        for k in 1..=2 * qq + 1 {
            for j in 1..=default_order(&params) - k {
                assert!(x.get(k, j).unwrap().norm() < 1e-9, "{p}/{q}: x^{k} y^{j}");
            }
        }
        assert!((y.get(0, 1).unwrap() - params.nu).norm() < 1e-12);
        assert!(y.get(1, 0).unwrap().norm() < 1e-12, "h(0,0) = {}", y.get(1, 0).unwrap());
        for j in 2..=default_order(&params) {
            assert!(y.get(0, j).unwrap().norm() < 1e-12);
        }
        assert!((nf.c_coef - x.get(2 * qq + 1, 0).unwrap() / params.lambda).norm() < 1e-15);
    }
}

#[test]
fn zero_jacobian_reduces_to_one_dimensional_form() {
    for (p, q, t) in [(0, 1, 0.0), (1, 2, 0.0), (1, 3, 0.05)] {
        let params = member(p, q, t, 0.0);
        let order = default_order(&params);
        let nf = reduce(&params, order).unwrap();
        let one = normal_form_1d(&PolyParams::new(rot(p, q), t), order).unwrap();
        for k in 0..=order {
            assert!((nf.normal.x.get(k, 0).unwrap() - one.normal[k]).norm() < 1e-10, "{p}/{q}: x^{k}");
        }
        assert!(nf.normal.y.max_abs() < 1e-15);
        assert!(nf.wss.max_abs() == 0.0);
    }
}

#[test]
fn small_jacobian_limit() {
    for (p, q, t) in [(0, 1, 0.05), (1, 2, -0.02), (1, 2, 0.0)] {
        let params = member(p, q, t, 1e-5);
        let order = default_order(&params);
        let nf = reduce(&params, order).unwrap();
        let one = normal_form_1d(&PolyParams::new(rot(p, q), t), order).unwrap();
        for k in 0..=2 * q as usize + 1 {
            assert!((nf.normal.x.get(k, 0).unwrap() - one.normal[k]).norm() < 1e-8, "{p}/{q}: x^{k}");
        }
        assert!((nf.c_coef - one.c_coef).norm() < 1e-8);
    }
}

#[test]
fn strong_stable_slope_matches_eigenvector() {
    let params = member(0, 1, 0.0, 0.1);
    let w = wss_graph(&params, 8).unwrap();
    let nu = eigenvalues(params.jacobian(params.fixed)).into_iter().min_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    // Eigenvector (ν, a) of [[2x_q, a], [a, 0]]: the graph slope dx/dy is ν/a.
    let slope = nu / params.a;
    assert!((w[1] - slope).norm() < 1e-10);
    assert!((w[1] + params.a / params.lambda).norm() < 1e-12);
    assert_eq!(w[0], cx(0.0, 0.0));
}

#[test]
fn strong_stable_points_contract_at_rate_nu() {
    let params = member(0, 1, 0.05, 0.3);
    let w = wss_graph(&params, 12).unwrap();
    let rate = params.nu.norm();
    for k in 0..16 {
        let yy = Cx::from_polar(0.1 * (k as f64 + 1.0) / 16.0, k as f64);
        let mut p = (params.fixed.0 + w.eval(yy), params.fixed.1 + yy);
        for _ in 0..3 {
            let next = params.apply(p);
            let ratio = dist(next, params.fixed) / dist(p, params.fixed);
            assert!((ratio / rate - 1.0).abs() < 0.2, "ratio {ratio} vs |ν| = {rate}");
            p = next;
        }
    }
}

#[test]
fn straightening_preserves_horizontal_slices() {
    let params = member(1, 2, 0.02, 0.1);
    let nf = reduce(&params, default_order(&params)).unwrap();
    for (i, j, c) in nf.straightening.y.terms() {
        if i >= 1 {
            assert!(c.norm() < 1e-10, "x^{i} y^{j}: {c}");
        }
    }
}

#[test]
fn change_fixes_origin_with_expected_linear_part() {
    let params = member(1, 2, 0.05, 0.1);
    let nf = reduce(&params, default_order(&params)).unwrap();
    assert_eq!(nf.change.eval((cx(0.0, 0.0), cx(0.0, 0.0))), (cx(0.0, 0.0), cx(0.0, 0.0)));
    let d = nf.change.linear_part();
    assert!((d[0][0] - nf.scale).norm() < 1e-12);
    assert!((d[1][1] - 1.0).norm() <= 2.0 * params.a.norm_sqr());
    let l = nf.normal.linear_part();
    assert!((l[0][0] - params.lambda).norm() < 1e-12 && (l[1][1] - params.nu).norm() < 1e-12);
    assert!(l[0][1].norm() < 1e-12 && l[1][0].norm() < 1e-12);
}

#[test]
fn round_trip_between_coordinates() {
    let params = member(0, 1, 0.05, 0.05);
    let nf = reduce(&params, 6).unwrap();
    let p = (cx(-0.03, 0.01), cx(0.02, -0.01));
    let back = nf.to_normal(&params, nf.from_normal(&params, p));
    assert!(dist(back, p) < 1e-9);
}

#[test]
fn reduce_preconditions() {
    let params = member(1, 2, 0.0, 0.1);
    assert!(reduce(&params, 5).unwrap_err().is_precondition());
}

#[test]
fn petal_trapping_to_cycle() {
    let params = member(1, 1, 0.05, 0.05);
    let nf = reduce(&params, default_order(&params)).unwrap();
    let report = petal_check(&params, &nf, &PetalConfig::default()).unwrap();
    assert!(matches!(report.target, Target::Cycle(ref c) if c.len() == 1));
    assert_eq!(report.rotation_failures, 0);
    assert_eq!(report.convergence_failures, 0);
    assert!(report.passed());
    assert_eq!(report.converged_fraction(), 1.0);
    assert!(report.max_image_height < 0.1, "fattening {}", report.max_image_height);
}

#[test]
fn petal_trapping_to_origin() {
    // At 500 steps the rate 0.99ⁿ is too slow; 5000 steps settle every sample.
    let params = member(1, 2, -0.01, 0.05);
    let nf = reduce(&params, default_order(&params)).unwrap();
    let cfg = PetalConfig { steps: 5000, ..PetalConfig::default() };
    let report = petal_check(&params, &nf, &cfg).unwrap();
    assert!(matches!(report.target, Target::FixedPoint(_)));
    assert!(report.passed(), "rotation {} convergence {}", report.rotation_failures, report.convergence_failures);
}

#[test]
fn parabolic_petals_rotate_without_target() {
    for (p, q) in [(1, 1), (1, 2), (1, 3), (2, 5)] {
        let params = member(p, q, 0.0, 0.05);
        let nf = reduce(&params, default_order(&params)).unwrap();
        let report = petal_check(&params, &nf, &PetalConfig::default()).unwrap();
        assert!(matches!(report.target, Target::None));
        assert_eq!(report.rotation_failures, 0, "{p}/{q}");
        assert_eq!(report.convergence_failures, 0);
    }
}

#[test]
fn petal_check_needs_samples() {
    let params = member(1, 1, 0.05, 0.05);
    let nf = reduce(&params, 6).unwrap();
    let cfg = PetalConfig { samples: 10, ..PetalConfig::default() };
    assert!(petal_check(&params, &nf, &cfg).unwrap_err().is_precondition());
}

#[test]
fn petal_geometry() {
    assert!(in_petal_disks(cx(-0.5, 0.3), 1.0));
    assert!(!in_petal_disks(cx(0.5, 0.0), 1.0));
    assert_eq!(petal_index(cx(1.0, 0.1), 3), 0);
    assert_eq!(petal_index(cx(-1.0, 0.1), 3), 1);
    assert_eq!(petal_index(cx(0.5, -0.1), 3), 2);
}
