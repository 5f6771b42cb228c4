use thiserror::Error;

/// Errors raised by the simulator, the verifiers and the file formats.
#[derive(Debug, Error)]
pub enum NsfError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scenario violates data assumptions: {0}")]
    InvalidScenario(String),

    #[error("aliasing guard: {modes} modes need at least {needed} quadrature points per direction, have {have}")]
    Aliasing {
        modes: usize,
        needed: usize,
        have: usize,
    },

    #[error("incompatible Neumann right-hand side: |mean| = {mean:e}, tolerance {tol:e}")]
    Incompatible { mean: f64, tol: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("non-finite value detected at t = {time}: {what}")]
    NonFinite { time: f64, what: String },

    #[error("cut-off support violation: {0}")]
    Support(String),

    #[error("verifier precondition failed: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NsfError>;

pub(crate) fn invalid(msg: impl Into<String>) -> NsfError {
    NsfError::InvalidParameter(msg.into())
}
