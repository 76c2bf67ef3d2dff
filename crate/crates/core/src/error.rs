use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("image too small: {width}x{height} (minimum {min}x{min})")]
    ImageTooSmall { width: u32, height: u32, min: u32 },

    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// The container holds manifest framing that cannot be reassembled.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("asset already carries a manifest envelope")]
    EnvelopeExists,

    #[error("envelope of {0} bytes exceeds the container limit")]
    EnvelopeTooLarge(usize),

    #[error("unsupported or unrecognized asset format")]
    UnknownFormat,

    #[error("certificate chain holds no private key")]
    MissingPrivateKey,

    #[error("crypto: {0}")]
    Crypto(String),

    #[error("render: {0}")]
    Render(String),

    #[error(transparent)]
    Codec(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
