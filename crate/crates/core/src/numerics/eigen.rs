use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{invalid, Error, Result};

/// Sweeps stop once the off-diagonal Frobenius norm drops below this
/// fraction of the input's Frobenius norm.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix.
///
/// Eigenvalues are in descending order (ties keep their original diagonal
/// position); column `k` of `eigenvectors` belongs to `eigenvalues[k]` and has
/// its largest-magnitude component positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    /// `max_k ||A v_k - lambda_k v_k||`.
    pub residual: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(lambda) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        Matrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)]).sum()
        })
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Fails with `InvalidArgument` on non-square or asymmetric input (tolerance
/// `1e-10` relative to the largest entry) and with `NumericFailure` when the
/// sweep budget is exhausted or the final residual exceeds `tol`.
pub fn spectral_decomposition(a: &Matrix, tol: f64) -> Result<SpectralDecomposition> {
    if !a.is_square() {
        return invalid(format!("eigendecomposition needs a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let n = a.rows();
    let asym = a.asymmetry();
    if asym > 1e-10 * a.max_abs().max(1.0) {
        return invalid(format!("matrix is not symmetric (max asymmetry {asym:e})"));
    }

    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let threshold = OFF_DIAGONAL_THRESHOLD * a.frobenius_norm();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                rotated |= rotate(&mut m, &mut v, p, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep index order
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        orient(&mut col);
        for (i, x) in col.into_iter().enumerate() {
            eigenvectors[(i, k)] = x;
        }
    }

    let residual = max_residual(a, &eigenvalues, &eigenvectors);
    if !converged {
        return Err(Error::NumericFailure {
            message: format!("Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"),
            residual,
        });
    }
    if !(residual <= tol) {
        return Err(Error::NumericFailure {
            message: format!("eigen-residual exceeds tolerance {tol:e}"),
            residual,
        });
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors, residual })
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m[(i, j)] * m[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Applies the rotation that annihilates `m[p][q]`; returns false if the
/// entry is already zero.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) -> bool {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return false;
    }
    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    if t == 0.0 {
        return false;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = m.rows();
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = c * akp - s * akq;
        m[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = c * apk - s * aqk;
        m[(q, k)] = s * apk + c * aqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
    true
}

/// Flips `col` so its largest-magnitude component (first one on ties) is positive.
pub(crate) fn orient(col: &mut [f64]) {
    let mut best = 0;
    for (i, x) in col.iter().enumerate() {
        if x.abs() > col[best].abs() {
            best = i;
        }
    }
    if col.get(best).is_some_and(|x| *x < 0.0) {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

fn max_residual(a: &Matrix, values: &[f64], vectors: &Matrix) -> f64 {
    let n = a.rows();
    (0..n)
        .map(|k| {
            let vk = vectors.column(k);
            let av = a.mul_vec(&vk);
            av.iter()
                .zip(&vk)
                .map(|(x, y)| (x - values[k] * y).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}
