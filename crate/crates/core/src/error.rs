use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("state is not normalized (norm = {norm})")]
    Unnormalized { norm: f64 },

    #[error("reference amplitude v(G) vanishes (|v(G)| = {magnitude:e})")]
    ReferenceAmplitudeZero { magnitude: f64 },

    #[error("singular input: {0}")]
    Singular(String),

    #[error("dimension {dim} exceeds the dense cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("state has empty support")]
    EmptySupport,

    #[error("missing lower-order amplitude for P={p}, Q={q}")]
    MissingAmplitude { p: String, q: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
