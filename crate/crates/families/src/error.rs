use nacy_cost::CostError;
use nacy_polyhedral::PolyError;
use nacy_transport::TransportError;
use nacy_tropical::TropicalError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("polytope is not reflexive: {0}")]
    NotReflexive(String),
    #[error("family data violates an invariant: {0}")]
    InvariantViolation(String),
    #[error("series known to degree {depth} but degree {level} was requested")]
    SeriesDepthExceeded { level: u32, depth: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
}

pub type Result<T> = std::result::Result<T, FamilyError>;
