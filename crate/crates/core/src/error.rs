use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not SPD: pivot {index} = {value:e} at or below tolerance {tolerance:e}")]
    NotSpd {
        index: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("matrix entries must be finite and symmetric: ({row}, {col})")]
    BadMatrixEntry { row: usize, col: usize },

    #[error("stability index q must lie in (0, 2], got {0}")]
    StabilityIndex(f64),

    #[error("step functions must share one partition")]
    PartitionMismatch,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: u64, got: u64 },

    #[error("invalid {what}: {why}")]
    InvalidInput { what: &'static str, why: String },

    #[error("operation requires a bounded body")]
    UnboundedBody,

    #[error("function evaluation failed at sample {sample}: value {value}")]
    EvalFailure { sample: u64, value: f64 },

    #[error("finite-difference step {step} leaves the SPD region")]
    StepTooLarge { step: f64 },

    #[error("correlation must satisfy |rho| < 1, got {0}")]
    CorrelationOutOfRange(f64),

    #[error("lambda must lie in [0, 1), got {0}")]
    LambdaOutOfRange(f64),
}

impl Error {
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::InvalidInput {
            what,
            why: why.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
