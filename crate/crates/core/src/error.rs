use thiserror::Error;

/// Errors raised by the evaluation, simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("index {index} exceeds the precomputed limit {limit}")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} above tolerance {tolerance:e}")]
    QuadratureNonConvergent {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("Laplace inversion failed: {0}")]
    Inversion(String),

    #[error("condition number {0} is below the Cauchy-Schwarz bound 1")]
    ConditionBelowOne(f64),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("unstable inversion: |rho| = {rho:e} is below the floor {floor:e}")]
    UnstableInversion { rho: f64, floor: f64 },

    #[error("subordinator is not long-tailed: {0}")]
    NotLongTailed(String),

    #[error("insufficient data: need at least {need}, got {got}")]
    InsufficientData { need: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
