use thiserror::Error;

/// Errors raised while parsing, analyzing or simulating a walk.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed walk document: {0}")]
    Malformed(String),

    #[error("term with shift {shift} has a {rows}x{cols} matrix, expected {n}x{n}")]
    Shape {
        shift: i64,
        rows: usize,
        cols: usize,
        n: usize,
    },

    #[error("duplicate shift {0}")]
    DuplicateShift(i64),

    #[error("walk has no nonzero term")]
    Empty,

    #[error("coefficient identity for offset m={offset} violated: residual {residual:.3e}")]
    NotUnitary { offset: i64, residual: f64 },

    #[error("dimension mismatch: expected n={expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot disambiguate bands in k-interval [{k_lo}, {k_hi}]")]
    UnresolvedCrossing { k_lo: f64, k_hi: f64 },

    #[error("band is constant; its period is undefined")]
    ConstantBand,

    #[error("winding number not integral: raw value {raw}")]
    NonIntegerWinding { raw: f64 },

    #[error("determinant winding {det} disagrees with summed band windings {bands}")]
    InconsistentWinding { det: i64, bands: i64 },

    #[error("walk is not realizable by a continuous-time walk")]
    NotRealizable,

    #[error("window of {len} sites leaves no interior with margin {margin}")]
    TruncationTooSmall { len: usize, margin: usize },

    #[error("window would need {needed_mb} MB, cap is {cap_mb} MB")]
    MemoryCap { needed_mb: u64, cap_mb: u64 },

    #[error("bands carry no eigenvector sections")]
    MissingSections,

    #[error("invalid test: {0}")]
    InvalidTest(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
