use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected d={expected}, got d={got}")]
    DimensionMismatch { expected: u32, got: u32 },

    #[error("letter {letter} out of range for alphabet of size {d}")]
    LetterOutOfRange { letter: u32, d: u32 },

    #[error("expansion depth {depth} is smaller than an existing right word of length {max_nu}")]
    DepthTooSmall { depth: usize, max_nu: usize },

    #[error("word of length {len} exceeds truncation depth {depth}")]
    WordTooLong { len: usize, depth: usize },

    #[error("dense size guard exceeded: {cells} cells > cap {cap} (set EMBEZZLE_MAX_CELLS to raise)")]
    SizeCap { cells: u128, cap: u128 },

    #[error("invalid Schmidt data: {0}")]
    InvalidSpectrum(String),

    #[error("factorization exceeds prime bound {bound}: cofactor {cofactor} of {value} is composite")]
    FactorBound {
        value: String,
        cofactor: String,
        bound: u64,
    },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("q must be a prime >= 5, got {0}")]
    ExcludedPrecondition(u64),

    #[error("inadmissible polynomial: {0}")]
    InadmissiblePoly(String),

    #[error("protocol span basis is ill-conditioned (condition number > {0:e})")]
    IllConditioned(f64),

    #[error("Schmidt rank deficient: singular value {0:e} below threshold")]
    RankDeficient(f64),

    #[error("input is not a unit vector: norm {0}")]
    NotUnit(f64),

    #[error("unitarity defect {0:e} too large for a meaningful marginal comparison")]
    NotUnitary(f64),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
