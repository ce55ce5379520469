//! Hyperbolic relaxation of the Cahn-Hilliard equation and a reference
//! implicit solver for the original fourth-order problem.

pub mod cauchy;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod gmres;
pub mod grid;
pub mod hyperbolic;
pub mod interp;
pub mod output;
pub mod params;
pub mod physics;
pub mod reference;
pub mod runner;
pub mod scenarios;
pub mod state;

pub use error::{Error, Result};
pub use grid::Grid;
pub use params::ModelParams;
pub use state::{FieldState, ScalarField};
