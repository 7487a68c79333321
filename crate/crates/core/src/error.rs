use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an argument precondition (bad `(b, k)` range, `t > T`, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested computation is impossible for this configuration
    /// (infinite retained jump rate, Kingman atom in a jump-based construction, ...).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Degenerate input such as the zero measure where a positive rate is required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A query landed outside the tabulated/simulated range. No silent extrapolation.
    #[error("out of range: {0}")]
    Range(String),

    /// A hard capacity limit was hit (appendix-family depth cap).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Malformed input data (unsorted atoms, unparsable measure document, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn configuration(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
}
