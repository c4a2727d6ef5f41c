use thiserror::Error;

/// Errors raised by the Gaussian engine and the Fock-space oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EiweError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Truncated Fock space lost more probability than allowed.
    #[error("truncation error: trace defect {defect:e} exceeds bound {bound:e}")]
    Truncation { defect: f64, bound: f64 },

    #[error("degenerate outcome: probability {0:e} is numerically zero")]
    DegenerateOutcome(f64),
}

pub type Result<T> = std::result::Result<T, EiweError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(EiweError::InvalidArgument(msg.into()))
}
