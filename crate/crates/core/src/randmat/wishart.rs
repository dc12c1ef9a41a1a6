use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::{
    derive_seed, fit_sqrt_model, gaussian_matrix_with, seeded_rng, spectral_decomposition, Matrix, SqrtFitParams,
};

/// `W = G G^T` for an `n x d` standard Gaussian `G`.
pub fn sample_wishart(n: usize, d: usize, seed: u64) -> Result<Matrix> {
    if n == 0 || d == 0 {
        return invalid(format!("Wishart dimensions must be positive, got n={n}, d={d}"));
    }
    let g = gaussian_matrix_with(&mut seeded_rng(seed, 0), n, d, 1.0)?;
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = g.row(i).iter().zip(g.row(j)).map(|(a, b)| a * b).sum();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    Ok(w)
}

/// Descending eigenvalues of a sampled Wishart matrix.
pub fn wishart_eigenvalues(w: &Matrix) -> Result<Vec<f64>> {
    let tol = 1e-9 * w.frobenius_norm().max(1.0);
    Ok(spectral_decomposition(w, tol)?.eigenvalues)
}

/// Smallest gap between consecutive entries of a descending list.
pub fn min_eigengap(eigs: &[f64]) -> Result<f64> {
    if eigs.len() < 2 {
        return invalid(format!("need at least two eigenvalues, got {}", eigs.len()));
    }
    if eigs.windows(2).any(|w| !(w[0] >= w[1])) {
        return invalid("eigenvalues must be sorted in descending order");
    }
    Ok(eigs.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigengapPoint {
    pub d: usize,
    pub mean_min_gap: f64,
    pub std_err: f64,
}

/// Average minimum eigengap of `W_n(I, d)` across a grid of `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigengapSeries {
    pub n: usize,
    pub reps: usize,
    pub grid: Vec<EigengapPoint>,
}

impl EigengapSeries {
    /// CSV `d,mean_min_gap,std_err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,mean_min_gap,std_err\n");
        for p in &self.grid {
            writeln!(out, "{},{},{}", p.d, p.mean_min_gap, p.std_err).expect("writing to a String cannot fail");
        }
        out
    }

    /// Fits `x sqrt(d - y) + z` to the means.
    pub fn fit(&self) -> Result<SqrtFitParams> {
        let ds: Vec<f64> = self.grid.iter().map(|p| p.d as f64).collect();
        let vs: Vec<f64> = self.grid.iter().map(|p| p.mean_min_gap).collect();
        fit_sqrt_model(&ds, &vs)
    }
}

/// Replicate seed for `(d, rep)` in an eigengap run.
pub(crate) fn replicate_seed(seed: u64, d: usize, rep: usize) -> u64 {
    derive_seed(seed, &[d as u64, rep as u64])
}

/// For each `d`, averages the minimum eigengap of `reps` independent
/// Wishart matrices and reports the standard error of the mean.
pub fn eigengap_experiment(n: usize, d_grid: &[usize], reps: usize, seed: u64) -> Result<EigengapSeries> {
    if n < 2 {
        return invalid("eigengaps need n >= 2");
    }
    if reps == 0 {
        return invalid("need at least one replicate");
    }
    if d_grid.is_empty() || d_grid.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("d grid must be non-empty and strictly increasing");
    }
    if let Some(d) = d_grid.iter().find(|&&d| d < n) {
        return invalid(format!("d={d} is below n={n}; rank-deficient Wishart matrices have zero gaps"));
    }
    let mut grid = Vec::with_capacity(d_grid.len());
    for &d in d_grid {
        let gaps = (0..reps)
            .map(|rep| {
                let w = sample_wishart(n, d, replicate_seed(seed, d, rep))?;
                min_eigengap(&wishart_eigenvalues(&w)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean_min_gap, std_err) = mean_and_std_err(&gaps);
        grid.push(EigengapPoint { d, mean_min_gap, std_err });
    }
    Ok(EigengapSeries { n, reps, grid })
}

pub(crate) fn mean_and_std_err(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}
