use thiserror::Error;

/// Errors produced anywhere in the graph-energy pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested model would need edge probabilities outside [0, 1].
    #[error("infeasible model: {0}")]
    Infeasible(String),

    /// LAPACK reported a failure, or the iterative solver ran out of steps.
    #[error("eigensolver failed (seed {seed:#018x}): {reason}")]
    Eigensolver { seed: u64, reason: String },

    /// A computed spectrum broke the trace or second-moment identity.
    #[error("spectral identity violated (seed {seed:#018x}): {reason}")]
    Identity { seed: u64, reason: String },

    /// Too many instantiations failed for the sweep result to be trusted.
    #[error("sweep aborted: {failed} of {attempted} instantiations failed")]
    SweepAborted { failed: usize, attempted: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether this error stems from the numerics rather than the inputs or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigensolver { .. } | Error::Identity { .. } | Error::SweepAborted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
