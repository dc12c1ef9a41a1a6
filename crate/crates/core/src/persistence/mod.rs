//! Rips and Čech filtrations in the radius convention and reduced persistent
//! homology over Z/2.
//!
//! Every complex contains all simplices up to dimension `N + 1` on its vertex
//! set, so reduced homology in degrees `0..=N` dies by the end of the
//! filtration and every stored pair is finite.

mod analytic;
mod complex;
mod diagram;
mod meb;
mod reduce;

pub use analytic::{analytic_simplex_diagram, binomial, regular_simplex_cloud};
pub use complex::{cech_complex, predicted_simplex_count, rips_complex, FilteredComplex, Filtration, Simplex};
pub use diagram::{diagrams_from_csv, diagrams_to_csv, DiagramPoint, PersistenceDiagram};
pub use meb::meb_radius;
pub use reduce::{compute_diagrams, compute_diagrams_with, Reduction};
