use thiserror::Error;

/// Errors produced by the manifold backends, solvers and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("vector is not of unit length (norm {0})")]
    NotUnit(f64),

    #[error("points are antipodal; the shortest geodesic is not unique")]
    AntipodalPoints,

    #[error("geodesic parameter {t} outside [0, {max}]")]
    GeodesicParameterOutOfRange { t: f64, max: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gradient directions are rank deficient (rank {rank} < 6)")]
    RankDeficient { rank: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported format version {found:?} (expected {expected:?})")]
    VersionMismatch { found: String, expected: String },

    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },

    #[error("invalid point at cell {cell}: {source}")]
    InvalidCell {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
