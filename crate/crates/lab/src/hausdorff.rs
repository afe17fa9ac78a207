//! Hausdorff distance between point clouds in `C² ≅ R⁴`.

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use semipar::henon::{Point, PointCloud};

use crate::error::{LabError, LabResult};

fn coords(p: &Point) -> [f64; 4] {
    [p.0.re, p.0.im, p.1.re, p.1.im]
}

/// `sup_{a ∈ A} min_{b ∈ B} |a − b|`.
pub fn directed(a: &PointCloud, b: &PointCloud) -> LabResult<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(LabError::EmptyCloud);
    }
    let pts: Vec<[f64; 4]> = b.points.iter().map(coords).collect();
    let tree: ImmutableKdTree<f64, 4> = ImmutableKdTree::new_from_slice(&pts);
    let worst = a
        .points
        .iter()
        .map(|p| tree.nearest_one::<SquaredEuclidean>(&coords(p)).distance)
        .fold(0.0, f64::max);
    Ok(worst.sqrt())
}

/// Symmetric Hausdorff distance.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> LabResult<f64> {
    Ok(directed(a, b)?.max(directed(b, a)?))
}
