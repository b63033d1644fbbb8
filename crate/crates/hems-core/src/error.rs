//! Error type shared across the crate.

/// Errors produced by configuration loading, validation, encoding, and the
/// optimizers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration value or inconsistent problem definition.
    #[error("configuration error: {0}")]
    Config(String),

    /// A genome does not match the problem's encoding layout.
    #[error("encoding error: {0}")]
    Encoding(String),

    /// A schedule or profile does not match the problem's shape.
    #[error("shape error: {0}")]
    Shape(String),

    /// Slot index outside the grid.
    #[error("slot index {slot} out of range for a grid of {slot_count} slots")]
    SlotOutOfRange { slot: usize, slot_count: usize },

    /// The peak-to-average ratio of an all-zero profile is undefined.
    #[error("PAR is undefined for an all-zero energy profile")]
    UndefinedPar,

    /// Brute-force enumeration refused: the search space exceeds the cap.
    #[error("search space holds {size} genomes, above the enumeration cap of {cap}")]
    SpaceTooLarge { size: u128, cap: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn encoding(msg: impl Into<String>) -> Self {
        Error::Encoding(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    /// True when the error stems from bad input rather than a runtime failure.
    /// The CLI maps configuration errors to exit code 1 and everything else
    /// to exit code 2.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
