use thiserror::Error;

/// Errors produced anywhere in the sketch/reconstruct pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is out of its valid range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The truncation radius exceeds the maximum count.
    #[error("n >= B is required for the error guarantee, but n = {n} and B = {b}")]
    TruncationExceedsRange { n: u64, b: u64 },

    #[error("operation requires an unclipped sketch, but the sketch is clipped")]
    ClippedSketch,

    #[error("operation requires a clipped sketch, but the sketch is unclipped")]
    UnclippedSketch,

    #[error("ill-conditioned operator: |eigenvalue| = {magnitude:e} at index {index}")]
    IllConditioned { index: usize, magnitude: f64 },

    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },

    /// An invariant that valid inputs cannot violate was violated.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True when the error stems from user input rather than a bug or the environment.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::DimensionMismatch { .. }
                | Error::TruncationExceedsRange { .. }
                | Error::ClippedSketch
                | Error::UnclippedSketch
                | Error::Parse { .. }
                | Error::Json(_)
        ) || matches!(self, Error::Io(e) if e.kind() == std::io::ErrorKind::NotFound)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
