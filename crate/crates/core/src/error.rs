use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution must lie in 1..={max}, got {got}")]
    InvalidResolution { got: u32, max: u32 },

    #[error("grid index {index} out of range for resolution {resolution}")]
    IndexOutOfRange { index: u64, resolution: u32 },

    #[error("resolutions differ: {left} vs {right}")]
    ResolutionMismatch { left: u32, right: u32 },

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("order {n} is not representable at resolution {resolution} (limit 2^{resolution})")]
    OrderTooLarge { n: u64, resolution: u32 },

    #[error("depth {depth} exceeds resolution {resolution}")]
    DepthTooLarge { depth: u32, resolution: u32 },

    #[error("index must be positive")]
    ZeroIndex,

    #[error("partial sum index s={s} exceeds row index n={n}")]
    TauOutOfRange { s: u64, n: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("row {n} violates condition ({condition}): {detail}")]
    InvalidRow { n: u64, condition: char, detail: String },

    #[error("row {0} is not defined by this matrix")]
    RowUnavailable(u64),

    #[error("subsequence is empty")]
    EmptySubsequence,

    #[error("subsequence is not strictly increasing at position {0}")]
    NotIncreasing(usize),

    #[error("averaging window leaves [0,1)")]
    WindowOutOfRange,

    #[error("invalid n-sequence: {0}")]
    InvalidSequence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
