//! Dual sample covariance and PCA compression for `n << d` clouds.
//!
//! Everything is computed from the `n x n` Gram matrix, so the cost is
//! `O(n^2 d)` regardless of how large the ambient dimension is. The
//! eigenvector for the null direction `1_n / sqrt(n)` of the centred matrix
//! is fixed analytically: the remaining spectrum is computed on an
//! orthonormal basis of the complement of `1_n` (a Helmert basis).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::{spectral_decomposition, Matrix, SpectralDecomposition};
use crate::pointcloud::{dot, PointCloud};

/// `I_n - 1_n 1_n^T / n`.
pub fn centering_matrix(n: usize) -> Result<Matrix> {
    if n == 0 {
        return invalid("centering matrix needs n >= 1");
    }
    let inv = 1.0 / n as f64;
    Ok(Matrix::from_fn(n, n, |i, j| if i == j { 1.0 - inv } else { -inv }))
}

/// `S_D = (n-1)^{-1} P_n Z^T Z P_n` for the `d x n` data matrix `Z`.
pub fn dual_sample_covariance(cloud: &PointCloud) -> Result<Matrix> {
    let n = cloud.len();
    if n < 2 {
        return invalid("dual sample covariance needs at least two points");
    }
    let g = cloud.gram();
    let row_means: Vec<f64> = (0..n).map(|i| g.row(i).iter().sum::<f64>() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let scale = 1.0 / (n - 1) as f64;
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = (g[(i, j)] - row_means[i] - row_means[j] + grand) * scale;
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok(s)
}

/// `n x (n-1)` matrix with orthonormal columns spanning `1_n^⊥`.
fn helmert_basis(n: usize) -> Matrix {
    Matrix::from_fn(n, n - 1, |i, k| {
        let k1 = (k + 1) as f64;
        let norm = (k1 * (k1 + 1.0)).sqrt();
        match i.cmp(&(k + 1)) {
            std::cmp::Ordering::Less => 1.0 / norm,
            std::cmp::Ordering::Equal => -k1 / norm,
            std::cmp::Ordering::Greater => 0.0,
        }
    })
}

/// Eigenpairs of a centred symmetric `n x n` matrix (`S 1_n = 0`). The last
/// pair is `(0, 1_n / sqrt(n))`, pinned rather than computed.
pub fn centered_spectrum(s: &Matrix) -> Result<SpectralDecomposition> {
    let n = s.rows();
    if !s.is_square() || n < 2 {
        return invalid("centred spectrum needs a square matrix of size >= 2");
    }
    let h = helmert_basis(n);
    let reduced = h.transpose().matmul(s)?.matmul(&h)?;
    // matrix products leave last-bit asymmetry; mirror the upper triangle
    let reduced = Matrix::from_fn(n - 1, n - 1, |i, j| if i <= j { reduced[(i, j)] } else { reduced[(j, i)] });
    let tol = 1e-9 * reduced.frobenius_norm().max(1.0);
    let inner = spectral_decomposition(&reduced, tol)?;

    let mut eigenvalues = inner.eigenvalues.clone();
    eigenvalues.push(0.0);
    let mut vectors = Matrix::zeros(n, n);
    let pinned = 1.0 / (n as f64).sqrt();
    for k in 0..n - 1 {
        let mut u = h.mul_vec(&inner.eigenvector(k));
        crate::numerics::eigen_orient(&mut u);
        for (i, x) in u.into_iter().enumerate() {
            vectors[(i, k)] = x;
        }
    }
    for i in 0..n {
        vectors[(i, n - 1)] = pinned;
    }
    let residual = (0..n)
        .map(|k| {
            let u = vectors.column(k);
            let su = s.mul_vec(&u);
            su.iter().zip(&u).map(|(a, b)| (a - eigenvalues[k] * b).powi(2)).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: vectors, residual })
}

/// Eigendecomposition of a cloud's dual sample covariance.
pub fn dual_spectrum(cloud: &PointCloud) -> Result<SpectralDecomposition> {
    centered_spectrum(&dual_sample_covariance(cloud)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CloudSource {
    Observed,
    Noise,
}

/// A cloud projected onto its leading `s` dual eigenvectors.
///
/// Normalized scores are `sqrt(n-1) (u_{i1}, ..., u_{is})`; classical scores
/// additionally weight coordinate `k` by `sqrt(lambda_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressedCloud {
    pub source: CloudSource,
    pub s: usize,
    pub points: Vec<Vec<f64>>,
    pub eigenvalues_used: Vec<f64>,
    pub normalized: bool,
}

impl CompressedCloud {
    pub fn to_point_cloud(&self) -> Result<PointCloud> {
        PointCloud::from_points(self.points.clone())
    }

    /// Coordinate `k` across all points.
    pub fn coordinate(&self, k: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[k]).collect()
    }
}

/// Normalized (or, with `normalized = false`, classical) PCA compression of
/// an observed cloud to `s` dimensions.
pub fn compress(cloud: &PointCloud, s: usize, normalized: bool) -> Result<CompressedCloud> {
    compress_as(cloud, s, normalized, CloudSource::Observed)
}

pub fn compress_as(cloud: &PointCloud, s: usize, normalized: bool, source: CloudSource) -> Result<CompressedCloud> {
    let n = cloud.len();
    if s == 0 || s >= n {
        return invalid(format!("compressed dimension must satisfy 1 <= s <= n - 1, got s={s}, n={n}"));
    }
    let spectrum = dual_spectrum(cloud)?;
    Ok(scores_from_spectrum(&spectrum, s, normalized, source))
}

pub(crate) fn scores_from_spectrum(
    spectrum: &SpectralDecomposition,
    s: usize,
    normalized: bool,
    source: CloudSource,
) -> CompressedCloud {
    let n = spectrum.dim();
    let root = ((n - 1) as f64).sqrt();
    let eigenvalues_used = spectrum.eigenvalues[..s].to_vec();
    let weights: Vec<f64> = eigenvalues_used
        .iter()
        .map(|l| if normalized { root } else { root * l.max(0.0).sqrt() })
        .collect();
    let points = (0..n)
        .map(|i| (0..s).map(|k| weights[k] * spectrum.eigenvectors[(i, k)]).collect())
        .collect();
    CompressedCloud { source, s, points, eigenvalues_used, normalized }
}

/// `u` if `<u, reference> >= 0`, otherwise `-u`.
pub fn sign_align(u: &[f64], reference: &[f64]) -> Result<Vec<f64>> {
    if u.len() != reference.len() {
        return invalid("vectors have different lengths");
    }
    for (name, v) in [("u", u), ("reference", reference)] {
        let norm = dot(v, v).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return invalid(format!("{name} is not a unit vector (norm {norm})"));
        }
    }
    Ok(if dot(u, reference) >= 0.0 { u.to_vec() } else { u.iter().map(|x| -x).collect() })
}

/// Eigenvector perturbation diagnostics for `S_{D,P'} = S_{D,E} + M_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenClosenessReport {
    /// `||u_k - u_k^E||` after sign alignment, `k = 1..s`.
    pub distances: Vec<f64>,
    /// `min_{k < n} (lambda_k^E - lambda_{k+1}^E)`.
    pub min_gap: f64,
    /// Spectral norm of `M_0 = S_{D,P'} - S_{D,E}`.
    pub m0_norm: f64,
    /// `2^{3/2} ||M_0||_2 / min_gap`; infinite when the gap vanishes.
    pub bound: f64,
}

pub fn eigen_closeness_report(observed: &PointCloud, noise: &PointCloud, s: usize) -> Result<EigenClosenessReport> {
    let n = observed.len();
    if noise.len() != n || noise.ambient_dim() != observed.ambient_dim() {
        return invalid("observed and noise clouds must have the same shape");
    }
    if s == 0 || s >= n {
        return invalid(format!("need 1 <= s <= n - 1, got s={s}, n={n}"));
    }
    let s_obs = dual_sample_covariance(observed)?;
    let s_noise = dual_sample_covariance(noise)?;
    let obs = centered_spectrum(&s_obs)?;
    let base = centered_spectrum(&s_noise)?;

    let distances = (0..s)
        .map(|k| {
            let reference = base.eigenvector(k);
            let u = sign_align(&obs.eigenvector(k), &reference)?;
            Ok(u.iter().zip(&reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;

    let min_gap = base.eigenvalues.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    let m0 = s_obs.sub(&s_noise)?;
    let m0 = Matrix::from_fn(n, n, |i, j| if i <= j { m0[(i, j)] } else { m0[(j, i)] });
    let m0_spec = spectral_decomposition(&m0, 1e-9 * m0.frobenius_norm().max(1.0))?;
    let m0_norm = m0_spec.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let bound = if min_gap > 0.0 { 2f64.powf(1.5) * m0_norm / min_gap } else { f64::INFINITY };
    Ok(EigenClosenessReport { distances, min_gap, m0_norm, bound })
}
