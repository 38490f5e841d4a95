use thiserror::Error;

/// Errors raised by problem construction, scheme configuration and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported problem: {0}")]
    UnsupportedProblem(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("plain Euler step left the domain at grid index {index}")]
    LeftDomain { index: usize },

    #[error("degenerate rate fit: only {usable} levels with positive error (need at least 3)")]
    DegenerateFit { usable: usize },

    #[error("tamed path {path_index} produced a non-finite value at n = {steps}")]
    NonFiniteTamedPath { path_index: u64, steps: usize },
}

impl Error {
    /// True for failures discovered while simulating, as opposed to bad input.
    pub fn is_runtime_anomaly(&self) -> bool {
        matches!(self, Error::NonFiniteTamedPath { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
