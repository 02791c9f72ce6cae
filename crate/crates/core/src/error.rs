use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument does not hold.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    /// The requested work exceeds a configured cap.
    #[error("{what}: requested {requested} exceeds cap {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    /// A computed quantity disagrees with an identity it must satisfy.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// FFT output cannot be rounded to exact integers.
    #[error("fft counts not exactly recoverable: {0}")]
    FftPrecision(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            reason: reason.into(),
        }
    }
}
