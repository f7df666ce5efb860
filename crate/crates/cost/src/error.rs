use nacy_polyhedral::PolyError;
use nacy_tropical::TropicalError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("dimension mismatch: source ambient dimension {source_dim}, target {target_dim}")]
    DimensionMismatch { source_dim: usize, target_dim: usize },
    #[error("theta window did not converge for x = {x:?}, p = {p:?}")]
    WindowNotConverged { x: Vec<f64>, p: Vec<f64> },
    #[error("theta family has no level {0}")]
    MissingLevel(u32),
    #[error("label {0} is not a section label at level {1}")]
    InvalidLabel(String, u32),
    #[error("invalid Mumford data: {0}")]
    InvalidData(String),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, CostError>;
