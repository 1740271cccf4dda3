//! Third-order semi-implicit staggered finite-volume solver for the 1D
//! shallow-water and Saint-Venant–Exner equations.

pub mod boundary;
pub mod error;
pub mod fluxes;
pub mod grid;
pub mod harness;
pub mod pressure;
pub mod reconstruct;
pub mod reference;
pub mod stepcontrol;
pub mod timeint;

pub use error::{Result, SolverError};

/// Gravitational acceleration (m/s²).
pub const GRAVITY: f64 = 9.81;
