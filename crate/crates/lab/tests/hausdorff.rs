use proptest::prelude::*;
use semipar::henon::{Point, PointCloud};
use semipar::Cx;
use semipar_lab::hausdorff::{directed, hausdorff};
use semipar_lab::LabError;

fn cloud(points: Vec<Point>) -> PointCloud {
    PointCloud::new(points, "test")
}

fn circle(n: usize) -> PointCloud {
    let zero = Cx::new(0.0, 0.0);
    cloud((0..n).map(|k| (Cx::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64), zero)).collect())
}

/// Quadratic-time Hausdorff distance.
fn brute(a: &[Point], b: &[Point]) -> f64 {
    let d = |p: &Point, q: &Point| ((p.0 - q.0).norm_sqr() + (p.1 - q.1).norm_sqr()).sqrt();
    let one = |u: &[Point], v: &[Point]| u.iter().map(|p| v.iter().map(|q| d(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    one(a, b).max(one(b, a))
}

#[test]
fn identical_clouds_are_at_distance_zero() {
    let c = circle(100);
    assert_eq!(hausdorff(&c, &c).unwrap(), 0.0);
}

#[test]
fn two_points() {
    let zero = Cx::new(0.0, 0.0);
    let a = cloud(vec![(zero, zero)]);
    let b = cloud(vec![(Cx::new(1.0, 0.0), zero)]);
    assert_eq!(hausdorff(&a, &b).unwrap(), 1.0);
}

#[test]
fn directed_distance_is_asymmetric() {
    let zero = Cx::new(0.0, 0.0);
    let a = cloud(vec![(zero, zero)]);
    let b = cloud(vec![(zero, zero), (Cx::new(0.0, 2.0), Cx::new(0.0, 0.0))]);
    assert_eq!(directed(&a, &b).unwrap(), 0.0);
    assert_eq!(directed(&b, &a).unwrap(), 2.0);
}

#[test]
fn circle_samples_within_spacing() {
    let d = hausdorff(&circle(1000), &circle(10_000)).unwrap();
    assert!(d <= 2.0 * std::f64::consts::PI / 1000.0, "{d}");
    assert!(d > 0.0);
}

#[test]
fn degenerate_clouds_on_a_line() {
    let zero = Cx::new(0.0, 0.0);
    let a = cloud((0..500).map(|k| (Cx::new(k as f64 / 500.0, 0.0), zero)).collect());
    let b = cloud((0..7).map(|k| (Cx::new(k as f64 / 7.0, 0.0), zero)).collect());
    assert!((hausdorff(&a, &b).unwrap() - brute(&a.points, &b.points)).abs() < 1e-12);
}

#[test]
fn empty_cloud_is_an_error() {
    let empty = cloud(Vec::new());
    assert!(matches!(hausdorff(&empty, &circle(3)), Err(LabError::EmptyCloud)));
    assert!(matches!(hausdorff(&circle(3), &empty), Err(LabError::EmptyCloud)));
}

fn points(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..max)
        .prop_map(|v| v.into_iter().map(|(a, b, c, d)| (Cx::new(a, b), Cx::new(c, d))).collect())
}

proptest! {
    #[test]
    fn matches_brute_force(a in points(60), b in points(60)) {
        let fast = hausdorff(&cloud(a.clone()), &cloud(b.clone())).unwrap();
        prop_assert!((fast - brute(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn symmetric_and_triangular(a in points(30), b in points(30), c in points(30)) {
        let (a, b, c) = (cloud(a), cloud(b), cloud(c));
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff(&b, &a).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert!(ab <= hausdorff(&a, &c).unwrap() + hausdorff(&c, &b).unwrap() + 1e-12);
    }
}
