use nacy_polyhedral::PolyError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TropicalError {
    #[error("point {0:?} is not on the face")]
    PointOffFace(Vec<f64>),
    #[error("section has no terms")]
    EmptySection,
    #[error("section repeats the term with exponent {0:?} and t-order {1}")]
    DuplicateTerm(Vec<i64>, i64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("section {section} has no unique dominant term on region {region}")]
    TieOnRegion { region: usize, section: usize },
    #[error("missing coefficient vector for id {0}")]
    MissingCoefficient(usize),
    #[error("row reduction needs more t-depth than the truncation provides (row {row})")]
    TruncationExhausted { row: usize },
    #[error("region decomposition supports faces of dimension at most 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, TropicalError>;
