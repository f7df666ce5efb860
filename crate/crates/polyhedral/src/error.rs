use thiserror::Error;

/// Errors raised while building or discretizing a polyhedral complex.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("vertex coordinate `{0}` is not a rational number of the form p/q")]
    NonRationalVertex(String),
    #[error("inconsistent gluing: {0}")]
    InconsistentGluing(String),
    #[error("degenerate face: {0}")]
    DegenerateFace(String),
    #[error("face is not in simplex presentation: {0}")]
    NotSimplexPresentation(String),
    #[error("face has dimension zero and carries no Lebesgue measure")]
    ZeroDimensionalFace,
    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("unsupported face dimension {0} (quadrature supports faces of dimension 1 and 2)")]
    UnsupportedDimension(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, PolyError>;
