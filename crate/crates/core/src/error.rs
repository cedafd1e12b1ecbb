use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("neighbor graph is disconnected at radius {radius}; smallest connecting radius found: {connecting_radius}")]
    GraphDisconnected { radius: f64, connecting_radius: f64 },

    #[error("insufficient sample: need at least {required} points, got {actual}")]
    InsufficientSample { required: usize, actual: usize },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no applicable pairs: {0}")]
    NoApplicablePairs(String),

    #[error("numerical consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
