use thiserror::Error;

/// Errors produced by the watermarking pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented range or otherwise invalid.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Inputs have incompatible shapes (image side, grid order, stream length).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The chaotic iteration collapsed (iterate hit 0 or 1, or the digit
    /// stream is constant). The caller should pick different key parameters.
    #[error("degenerate keystream: {0}")]
    DegenerateKeystream(String),

    /// Image codec failure (JPEG round trip, PNG I/O).
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
