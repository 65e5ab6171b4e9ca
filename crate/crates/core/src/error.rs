use thiserror::Error;

/// Errors produced by the design, simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polynomial degree {0}: need at least 2")]
    InvalidDegree(usize),

    #[error("invalid filter order {0}")]
    InvalidOrder(usize),

    #[error("no solution for constraint level gamma = {0}: need gamma > 1")]
    NoSolution(f64),

    #[error("singular point: coordinates {0} and {1} coincide")]
    SingularPoint(usize, usize),

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("infeasible filter: {0}")]
    InfeasibleFilter(String),

    #[error("filter is not strictly causal: tap at position {0}")]
    NonCausal(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel not admissible for tau = {tau}: (1+eps)*omega = {band} exceeds 1/(2 tau)")]
    KernelMismatch { tau: f64, band: f64 },

    #[error("evaluation window error: {0}")]
    Window(String),

    #[error("sigma = {0} is outside the regime sigma > 5/4")]
    OutOfRegime(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
