use super::{DiagramPoint, Filtration, PersistenceDiagram};
use crate::error::{invalid, Result};
use crate::pointcloud::PointCloud;

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Vertices `sqrt(scale) * e_i` of a regular simplex in `R^n`: all pairwise
/// distances equal `sqrt(2 scale)`.
pub fn regular_simplex_cloud(n: usize, scale: f64) -> Result<PointCloud> {
    if !(scale > 0.0) {
        return invalid(format!("scale must be positive, got {scale}"));
    }
    let a = scale.sqrt();
    let points = (0..n)
        .map(|i| {
            let mut p = vec![0.0; n];
            p[i] = a;
            p
        })
        .collect();
    PointCloud::from_points(points)
}

/// Closed-form degree-`degree` diagram of a regular simplex on `n` vertices
/// with squared edge length `2 * scale` (the observed-cloud limit with
/// `scale = nu d`).
///
/// * Rips: degree 0 is `(0, sqrt(2 scale)/2)` with multiplicity `n - 1`;
///   higher degrees are empty.
/// * Čech: a single point `(sqrt(scale N/(N+1)), sqrt(scale (N+1)/(N+2)))`
///   of multiplicity `C(n-1, N+1)`, the rank of the degree-`N` homology of
///   the `N`-skeleton of the simplex.
pub fn analytic_simplex_diagram(
    filtration: Filtration,
    n: usize,
    scale: f64,
    degree: usize,
) -> Result<PersistenceDiagram> {
    if n < 2 {
        return invalid(format!("need at least two vertices, got {n}"));
    }
    if degree + 2 > n {
        return invalid(format!("degree {degree} out of range for {n} vertices"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return invalid(format!("scale must be positive, got {scale}"));
    }
    let point = match filtration {
        Filtration::Rips if degree == 0 => DiagramPoint {
            birth: 0.0,
            death: (2.0 * scale).sqrt() / 2.0,
            multiplicity: n - 1,
        },
        Filtration::Rips => return Ok(PersistenceDiagram::empty(degree)),
        Filtration::Cech => {
            let q = degree as f64;
            DiagramPoint {
                birth: (scale * q / (q + 1.0)).sqrt(),
                death: (scale * (q + 1.0) / (q + 2.0)).sqrt(),
                multiplicity: binomial(n - 1, degree + 1) as usize,
            }
        }
    };
    PersistenceDiagram::new(degree, [point])
}
