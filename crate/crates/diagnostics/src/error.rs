use nacy_cost::CostError;
use nacy_polyhedral::PolyError;
use nacy_transport::TransportError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("result carries no transport plan")]
    NoPlanAvailable,
    #[error("theta series window too small at t = {t}, x = {x:?}: relative tail {tail:e}")]
    TruncationInsufficient { t: f64, x: Vec<f64>, tail: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, DiagnosticsError>;
