use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ambiguous geodesic: {0}")]
    AmbiguousGeodesic(String),

    #[error("numerically infeasible at sample {index}: {detail}")]
    NumericalInfeasibility { index: usize, detail: String },

    #[error("search failure: {0}")]
    SearchFailure(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("refinement stalled: {0}")]
    RefinementStall(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> GeomError {
    GeomError::InvalidInput(msg.into())
}
