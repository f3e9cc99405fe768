use alloc::string::String;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("curves do not share a basis")]
    IncompatibleBasis,

    #[error("underdetermined fit: {samples} samples for {dim} basis functions")]
    UnderdeterminedFit { samples: usize, dim: usize },

    #[error("rank-deficient fit")]
    RankDeficientFit,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("panel too short: need at least 2 periods, got {0}")]
    TooShort(usize),

    /// No series is observed at both periods (0-based).
    #[error("no series observed at both periods {0} and {1}")]
    IncompletePair(usize, usize),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("degenerate spectrum: eigenvalue {index} is numerically zero")]
    DegenerateSpectrum { index: usize },

    #[error("degenerate moment matrix in reduced-rank regression")]
    DegenerateMoments,

    #[error("true factors or loadings are rank deficient")]
    DegenerateTruth,
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
