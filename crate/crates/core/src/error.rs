use num_bigint::BigInt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("connection set is empty")]
    EmptySet,

    #[error("connection set contains the zero vector")]
    ZeroVector,

    #[error("vectors must all be nonzero and of the stated length")]
    BadVector,

    #[error("torus modulus {m} too small; need m > {bound}")]
    ModulusTooSmall { m: u64, bound: u64 },

    #[error("window {n} smaller than modulus {m}")]
    WindowTooSmall { n: u64, m: u64 },

    #[error("lattice index is infinite")]
    InfiniteIndex,

    #[error("index {0} is not square-free")]
    NotSquareFree(BigInt),

    #[error("modulus {0} not supported here")]
    InvalidModulus(BigInt),

    #[error("set does not span the stated lattice")]
    SpanMismatch,

    #[error("graph or group too large for exhaustive search: {0}")]
    ScaleExceeded(String),

    #[error("chain step not of a supported growth mode at prime {p}: {detail}")]
    UnsupportedChainStep { p: u64, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration interrupted by a cancellation request")]
    Interrupted,
}

pub type Result<T> = std::result::Result<T, Error>;
