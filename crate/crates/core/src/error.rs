use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("odd bit count {0}; QPSK needs pairs of bits")]
    OddBitCount(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("amplifier solve failed: {0}")]
    NoRoot(String),

    #[error("ZF estimator divides by a zero source-relay gain at relay {0}")]
    ZeroGain(usize),

    #[error("frame too long for exhaustive detection: N = {0} (max 6)")]
    FrameTooLong(usize),

    #[error("cannot fit diversity order: {0}")]
    Fit(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
