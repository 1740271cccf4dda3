use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("dry cell at index {index}: h = {h:e} (threshold {threshold:e})")]
    DryCell { index: usize, h: f64, threshold: f64 },

    #[error("singular system: pivot {pivot:e} at row {row} (scale {scale:e})")]
    SingularSystem { row: usize, pivot: f64, scale: f64 },

    #[error("boundary closure failed: {0}")]
    Assembly(String),

    #[error("near-critical flow: |1 - Fr^2| = {gap:e}")]
    NearCritical { gap: f64 },

    #[error("cubic root isolation failed: {0}")]
    RootIsolation(String),

    #[error("cannot size time step: {0}")]
    DegenerateStep(String),

    #[error("inflow velocity crosses zero at t = {t}")]
    InflowZeroVelocity { t: f64 },

    #[error("reference solution failed: {0}")]
    Reference(String),

    #[error("non-finite value in {field} at index {index}")]
    NonFinite { field: &'static str, index: usize },
}

pub type Result<T> = std::result::Result<T, SolverError>;
