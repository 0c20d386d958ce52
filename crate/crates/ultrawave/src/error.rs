use thiserror::Error;

/// Errors produced by tree construction, address handling, transforms and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("branching index {p} at vertex `{vertex}` is below the minimum of 2")]
    InvalidBranching { p: u64, vertex: String },

    #[error("tree depth must be at least 1")]
    InvalidDepth,

    #[error("tree too large: {vertices} vertices exceeds the limit of {limit}")]
    TreeTooLarge { vertices: u64, limit: u64 },

    #[error("top measure must be a positive rational, got {0}")]
    InvalidTopMeasure(String),

    #[error("address `{address}` is not a vertex of this tree: {reason}")]
    AddressOutOfRange { address: String, reason: String },

    #[error("`{0}` is not a valid address: {1}")]
    AddressParse(String, String),

    #[error("wavelet frequency j={j} out of range 1..={max} at vertex `{vertex}`")]
    InvalidFrequency { j: u32, max: u32, vertex: String },

    #[error("vertex `{0}` is a leaf; expected an internal vertex")]
    NotInternal(String),

    #[error("kernel is never evaluated on the diagonal (x == y)")]
    KernelDiagonal,

    #[error("kernel coefficient for vertex `{vertex}` is negative: {value}")]
    NegativeKernel { vertex: String, value: f64 },

    #[error("value length {got} does not match leaf count {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("grid function belongs to a different tree")]
    TreeMismatch,

    #[error("missing coefficient for vertex `{vertex}`, j={j}")]
    MissingCoefficient { vertex: String, j: u32 },

    #[error("leaf count {n} exceeds the size guard {limit} for the dense verification path")]
    SizeGuard { n: usize, limit: usize },

    #[error("argument t={0} lies outside the image interval [0, {1}]")]
    OutOfImage(String, String),

    #[error("tree spec: {0}")]
    Spec(String),

    #[error("{file}:{line}: {msg}")]
    Csv {
        file: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("tree spec JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
