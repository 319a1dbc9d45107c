use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid Davies parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("no feasible density-operator fixed point: {0}")]
    Infeasible(String),

    #[error("fixed-point iteration did not converge after {iterations} steps (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unsupported ambiguity: solution family has dimension {dimension}")]
    UnsupportedAmbiguity { dimension: usize },

    #[error("postselection probability zero (weight {weight:e})")]
    ZeroPostselection { weight: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
