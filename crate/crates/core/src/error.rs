use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNotConverged { sweeps: usize, off_norm: f64 },

    #[error("not a valid state: {0}")]
    NotAState(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("d_c is undefined (0/0) at this state")]
    UndefinedDc,

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("certificate postcondition violated: {0}")]
    Postcondition(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
