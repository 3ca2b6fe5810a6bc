use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model parameter is outside its admissible range.
    #[error("invalid parameter {name} = {value}: {bound}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        bound: &'static str,
    },

    /// An operation argument violates its precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge on [{lower}, {upper}] after {panels} panels (last error estimate {estimate:e})")]
    QuadratureNotConverged {
        lower: f64,
        upper: f64,
        panels: usize,
        estimate: f64,
    },

    #[error("covariance matrix is not positive definite (pivot {pivot} = {value:e}, jitter tried: {jitter:e})")]
    NotPositiveDefinite { pivot: usize, value: f64, jitter: f64 },

    #[error("circulant embedding is not nonnegative definite: eigenvalue {index} = {value:e} below -{tolerance:e}")]
    EmbeddingNotPsd {
        index: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("tractability limit exceeded: {0}")]
    TractabilityExceeded(String),

    #[error("insufficient data for rate fit: {0}")]
    InsufficientData(String),
}
