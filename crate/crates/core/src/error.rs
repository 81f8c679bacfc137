use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input vector is numerically zero")]
    ZeroInput,
    #[error("curvature-type tensor must be nonzero")]
    ZeroTensor,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input is not in the model space: {0}")]
    ModelViolation(String),
    #[error("block index out of range: {index} (have {blocks} blocks)")]
    IndexOutOfRange { index: usize, blocks: usize },
    #[error("unsupported convention: {0}")]
    UnsupportedConvention(String),
    #[error("invalid product spec: {0}")]
    SpecError(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("witness is not of Jordan rank one: {0}")]
    WitnessNotRankOne(String),
    #[error("block structure violation: {0}")]
    StructureError(String),
    #[error("sampling was inconclusive: {0}")]
    InconclusiveSample(String),
    #[error("the disc has no first characteristic variety")]
    DiscHasNoS1,
    #[error("pair (cone dim {cone_dim}, block dim {block_dim}) matches no rank >= 2 domain nor the disc")]
    UnrecognizedPair { cone_dim: usize, block_dim: usize },
    #[error("pair (cone dim {cone_dim}, block dim {block_dim}) is shared by {candidates}")]
    AmbiguousPair {
        cone_dim: usize,
        block_dim: usize,
        candidates: String,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
