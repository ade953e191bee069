//! Open-system dynamics of a two-qubit impurity model with zz-coupled bath
//! spins: reduced dynamics, dynamical-map extraction and complete-positivity
//! analysis.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod models;
pub mod scenario;
pub mod spin;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{Complex64, ComplexMatrix};
pub use models::{ModelParams, Topology};
pub use spin::{BlochVector, DensityMatrix};
