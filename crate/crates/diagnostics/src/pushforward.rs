//! Target-marginal discrepancies of plans and of argmax maps.

use nacy_transport::{c_transform_values, Direction, TransportProblem, TransportResult};
use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PushforwardSource {
    /// Column sums of the returned plan.
    Plan,
    /// `μ₀` pushed along `x ↦ argmax_p c(x, p) − ψ(p)`.
    Argmax,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PushforwardResidual {
    pub linf: f64,
    /// Total variation `Σ_j |pushed_j − W_j ν₀_j|`.
    pub l1: f64,
}

pub fn pushforward_residual(
    result: &TransportResult,
    problem: &TransportProblem,
    source: PushforwardSource,
) -> Result<PushforwardResidual> {
    let pushed = match source {
        PushforwardSource::Plan => {
            let plan = result.plan.as_ref().ok_or(DiagnosticsError::NoPlanAvailable)?;
            if plan.cols != problem.n_target() {
                return Err(DiagnosticsError::InvalidInput("plan does not match the problem".into()));
            }
            plan.col_sums()
        }
        PushforwardSource::Argmax => {
            if result.psi.len() != problem.n_target() {
                return Err(DiagnosticsError::InvalidInput("result does not match the problem".into()));
            }
            let (_, map) = c_transform_values(problem, &result.psi.values, Direction::TargetToSource);
            let mut pushed = vec![0.0; problem.n_target()];
            for (i, &j) in map.iter().enumerate() {
                pushed[j] += problem.source_mass()[i];
            }
            pushed
        }
    };
    let diff: Vec<f64> = pushed.iter().zip(problem.target_mass()).map(|(a, b)| (a - b).abs()).collect();
    Ok(PushforwardResidual {
        linf: diff.iter().copied().fold(0.0, f64::max),
        l1: nacy_polyhedral::pairwise_sum(&diff),
    })
}
