use nacy_cost::CostError;
use nacy_polyhedral::PolyError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("grid is empty")]
    EmptyGrid,
    #[error("potential has {got} values, grid has {expected} points")]
    GridMismatch { expected: usize, got: usize },
    #[error("LP size {rows}x{cols} exceeds the cap {cap}")]
    SizeCapExceeded { rows: usize, cols: usize, cap: usize },
    #[error("marginal masses differ: source {source_mass}, weighted target {target_mass}")]
    InfeasibleMarginals { source_mass: f64, target_mass: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, TransportError>;
