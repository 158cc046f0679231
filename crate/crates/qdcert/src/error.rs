use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// An enumeration would exceed its configured cap; the instance is
    /// beyond desk scale.
    #[error("enumeration cap exceeded for {what}: {needed} > {cap}")]
    CapExceeded {
        what: String,
        needed: String,
        cap: u64,
    },

    /// No admissible congruence level exists below the search cap.
    #[error("no admissible modulus: {0}")]
    NoModulus(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A quantity the run is required to maintain failed its check.
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 config, 3 cap, 4 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::NoModulus(_) => 2,
            Error::CapExceeded { .. } => 3,
            Error::Invariant(_) | Error::DimensionMismatch { .. } => 4,
            Error::Io(_) => 1,
        }
    }
}
