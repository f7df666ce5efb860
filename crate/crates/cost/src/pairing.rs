//! The bilinear pairing cost between polar-dual boundary complexes.

use std::sync::Arc;

use nacy_polyhedral::{q_to_f64, IntegralPolyhedralComplex};

use crate::error::{CostError, Result};
use crate::function::{CostFunction, PairingKernel, Provenance};

/// `c(x, p) = ⟨x, p⟩`; the Lipschitz constant in `x` is the largest Euclidean norm of a target vertex.
pub fn pairing_cost(
    source: Arc<IntegralPolyhedralComplex>,
    target: Arc<IntegralPolyhedralComplex>,
) -> Result<CostFunction> {
    if source.ambient_dim() != target.ambient_dim() {
        return Err(CostError::DimensionMismatch {
            source_dim: source.ambient_dim(),
            target_dim: target.ambient_dim(),
        });
    }
    let lipschitz_x = target
        .vertices()
        .iter()
        .map(|v| v.iter().map(|x| q_to_f64(x).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Ok(CostFunction { source, target, kernel: Arc::new(PairingKernel), lipschitz_x, provenance: Provenance::Pairing })
}
