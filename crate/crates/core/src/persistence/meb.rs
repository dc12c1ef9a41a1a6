use crate::error::{invalid, Result};
use crate::numerics::{solve_dense, Matrix};

pub const MAX_MEB_POINTS: usize = 16;

/// Radius of the smallest ball enclosing `points`.
///
/// Every subset is tried as a candidate support set: its circumcentre is
/// solved within the subset's affine hull (affinely dependent subsets are
/// skipped) and the smallest circumball that contains all points within a
/// relative tolerance of `1e-9` wins.
pub fn meb_radius(points: &[Vec<f64>]) -> Result<f64> {
    if points.is_empty() {
        return invalid("minimum enclosing ball of an empty set");
    }
    if points.len() > MAX_MEB_POINTS {
        return invalid(format!("exact enclosing ball supports at most {MAX_MEB_POINTS} points"));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return invalid("points have different dimensions");
    }
    let k = points.len();
    let sq = Matrix::from_fn(k, k, |i, j| {
        points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum()
    });
    let all: Vec<usize> = (0..k).collect();
    Ok(meb_radius_from_sq_dists(&sq, &all))
}

/// Enclosing-ball radius of the points `idx`, given only their squared
/// pairwise distances. Callers guarantee `1 <= idx.len() <= 16`.
pub(crate) fn meb_radius_from_sq_dists(sq: &Matrix, idx: &[usize]) -> f64 {
    let k = idx.len();
    debug_assert!((1..=MAX_MEB_POINTS).contains(&k));
    let scale = idx
        .iter()
        .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
        .fold(0.0_f64, |m, (i, j)| m.max(sq[(i, j)]));
    if scale == 0.0 {
        return 0.0;
    }

    let mut best_sq = f64::INFINITY;
    // subsets by increasing size so small supports are found first
    let mut masks: Vec<u32> = (1u32..(1u32 << k)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut support = Vec::with_capacity(k);
    for mask in masks {
        support.clear();
        support.extend((0..k).filter(|b| mask & (1 << b) != 0).map(|b| idx[b]));
        let Some((lambda, r_sq)) = circumsphere(sq, &support) else {
            continue;
        };
        if r_sq >= best_sq {
            continue;
        }
        let bound = r_sq * (1.0 + 1e-9) * (1.0 + 1e-9) + 1e-18 * scale;
        let encloses = idx.iter().all(|&j| dist_sq_to_center(sq, &support, &lambda, r_sq, j) <= bound);
        if encloses {
            best_sq = r_sq;
        }
    }
    best_sq.max(0.0).sqrt()
}

/// Affine coefficients (relative to the first support point) and squared
/// radius of the circumsphere of `support` inside its affine hull.
fn circumsphere(sq: &Matrix, support: &[usize]) -> Option<(Vec<f64>, f64)> {
    let p0 = support[0];
    let rest = &support[1..];
    let m = rest.len();
    if m == 0 {
        return Some((Vec::new(), 0.0));
    }
    // <v_a, v_b> with v_a = p_a - p_0
    let inner = |a: usize, b: usize| 0.5 * (sq[(p0, a)] + sq[(p0, b)] - sq[(a, b)]);
    let mut system = Vec::with_capacity(m * m);
    for &a in rest {
        for &b in rest {
            system.push(2.0 * inner(a, b));
        }
    }
    let rhs: Vec<f64> = rest.iter().map(|&a| sq[(p0, a)]).collect();
    let lambda = solve_dense(system, rhs.clone(), 1e-12)?;
    let r_sq = 0.5 * lambda.iter().zip(&rhs).map(|(l, v)| l * v).sum::<f64>();
    if !r_sq.is_finite() {
        return None;
    }
    Some((lambda, r_sq.max(0.0)))
}

fn dist_sq_to_center(sq: &Matrix, support: &[usize], lambda: &[f64], r_sq: f64, j: usize) -> f64 {
    let p0 = support[0];
    if support.contains(&j) {
        return r_sq;
    }
    // ||c - p_j||^2 = ||p0 - p_j||^2 + 2 sum_a lambda_a <v_a, p0 - p_j> + r^2
    let cross: f64 = support[1..]
        .iter()
        .zip(lambda)
        .map(|(&a, l)| -l * 0.5 * (sq[(p0, a)] + sq[(p0, j)] - sq[(a, j)]))
        .sum();
    sq[(p0, j)] + 2.0 * cross + r_sq
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        assert_eq!(meb_radius(&[vec![1.0, 2.0, 3.0]]).unwrap(), 0.0);
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let r = meb_radius(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn collinear_points() {
        let r = meb_radius(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        // dependent triple in the plane: the middle point is skipped cleanly
        let r = meb_radius(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn obtuse_triangle_uses_longest_edge() {
        let r = meb_radius(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]]).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn right_triangle() {
        let r = meb_radius(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!((r - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn regular_simplex_in_high_dimension() {
        // q+1 vertices a*e_i: circumradius a*sqrt(q/(q+1))
        for q in 1..6 {
            let pts: Vec<Vec<f64>> = (0..=q)
                .map(|i| {
                    let mut p = vec![0.0; 50];
                    p[i] = 3.0;
                    p
                })
                .collect();
            let r = meb_radius(&pts).unwrap();
            let expected = 3.0 * (q as f64 / (q as f64 + 1.0)).sqrt();
            assert!((r - expected).abs() < 1e-12, "q={q}: {r} vs {expected}");
        }
    }

    #[test]
    fn rejects_empty_and_oversized() {
        assert!(meb_radius(&[]).is_err());
        assert!(meb_radius(&vec![vec![0.0]; 17]).is_err());
        assert!(meb_radius(&[vec![0.0], vec![0.0, 1.0]]).is_err());
    }
}
