use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TbcError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pivot breakdown at row {row} (|pivot| = {magnitude:e})")]
    PivotBreakdown { row: usize, magnitude: f64 },
    #[error("Newton iteration for LGL node {index} did not converge")]
    NodeNonConvergence { index: usize },
    #[error("numerical blow-up at step {step}: {detail}")]
    Instability { step: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, TbcError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(TbcError::InvalidArgument(msg.into()))
}
