//! Random-matrix tools: Wishart eigengaps and moments of Haar-orthogonal
//! matrix entries.

mod weingarten;
mod wishart;

pub use weingarten::{
    haar_moment_exact, mc_haar_moment, moment_oracle, wg_o2, wg_o4, McEstimate, MomentOracle, Monomial, O4Pattern,
};
pub use wishart::{eigengap_experiment, min_eigengap, sample_wishart, wishart_eigenvalues, EigengapPoint, EigengapSeries};
