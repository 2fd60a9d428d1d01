use thiserror::Error;

/// Errors raised by the exact geometry and construction pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("index {index} out of range for {len} columns")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget of {budget} nodes exceeded")]
    EnumerationBudget { budget: u64 },

    #[error("polytope is unbounded or has empty interior")]
    Degenerate,

    #[error("dimension {dim} exceeds exact-computation cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("map is not injective on the relevant subspace")]
    NotInjective,

    #[error("subspaces are not orthogonal complements")]
    NotOrthogonal,

    #[error("sampler exhausted {tries} tries without an acceptable matrix")]
    SamplerExhausted { tries: u64 },

    #[error("parameters outside the recursion regime: {0}")]
    Regime(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("unverifiable: {0}")]
    Unverifiable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
