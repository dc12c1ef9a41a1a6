//! Topological data analysis for high-dimension, low-sample-size point clouds.
//!
//! The crate bundles everything needed to study how coordinate-wise noise
//! distorts persistence diagrams as the ambient dimension grows:
//!
//! * [`numerics`]: seeded Gaussian sampling, a cyclic Jacobi eigensolver,
//!   Haar-orthogonal sampling and a square-root curve fit.
//! * [`pointcloud`]: original / noise / observed clouds and their
//!   concentration statistics.
//! * [`persistence`]: Rips and Čech filtrations (radius convention), reduced
//!   persistent homology over Z/2, and closed-form regular-simplex diagrams.
//! * [`metrics`]: exact bottleneck distance and Hausdorff distance between
//!   diagrams.
//! * [`pca`]: dual sample covariance and normalized PCA compression.
//! * [`randmat`]: Wishart eigengaps and exact orthogonal Weingarten moments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod metrics;
pub mod numerics;
pub mod pca;
pub mod persistence;
pub mod pointcloud;
pub mod randmat;

pub use error::{Error, Result};
pub use numerics::{Matrix, SpectralDecomposition};
pub use persistence::{DiagramPoint, FilteredComplex, Filtration, PersistenceDiagram};
pub use pointcloud::PointCloud;
