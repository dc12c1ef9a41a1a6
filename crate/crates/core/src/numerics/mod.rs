//! Seedable numerical kernel shared by every other module.

mod eigen;
mod fit;
mod haar;
mod matrix;
mod rng;

pub use eigen::{spectral_decomposition, SpectralDecomposition, MAX_SWEEPS, OFF_DIAGONAL_THRESHOLD};
pub use fit::{fit_sqrt_model, SqrtFitParams};
pub use haar::{haar_orthogonal, haar_orthogonal_with};
pub use matrix::Matrix;
pub(crate) use eigen::orient as eigen_orient;
pub(crate) use matrix::solve_dense;
pub use rng::{derive_seed, gaussian_matrix_with, sample_gaussian_matrix, seeded_rng, Rng};
