//! Experiment runner for the `hdlss-tda` library: curse-of-dimensionality
//! sweeps, PCA mitigation, eigengap runs and oracle checks, with CSV/JSON
//! reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod oracles;
pub mod report;

pub use config::{Experiment, ExperimentConfig, Format, ShapeKind};
pub use error::{CliError, Result};
pub use experiments::{
    run, run_curse, run_eigengap, run_mitigation, run_simplex_check, run_validation_suite, run_weingarten_check,
};
pub use report::{emit_report, Aggregate, ExperimentReport, OracleResult, Record, Trend};
