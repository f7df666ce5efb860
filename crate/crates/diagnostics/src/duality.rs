//! Mirror duality between a problem and its role-swapped counterpart.

use nacy_transport::{
    c_transform_values, kontorovich_value, Direction, PotentialField, TransportProblem, TransportResult,
};
use serde::Serialize;

use crate::error::{DiagnosticsError, Result};

/// Pairs sampled for the symmetry precondition, at most.
const SYMMETRY_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    /// `|F(φ₀) − F^∨(φ₀^c)|`.
    pub functional_gap: f64,
    /// `min_a ‖ψ₀ − (φ₀^c + a)‖_∞`, with `ψ₀` the dual problem's minimizer.
    pub potential_gap: f64,
    /// Optimal constant `a`.
    pub shift: f64,
    /// Largest `|c(x, p) − c^∨(p, x)|` over sampled grid pairs.
    pub precondition_residual: f64,
}

/// Compares `(problem, result)` with `(dual_problem, dual_result)`, where the dual problem's source
/// grid must be the problem's target grid.
pub fn duality_check(
    problem: &TransportProblem,
    dual_problem: &TransportProblem,
    result: &TransportResult,
    dual_result: &TransportResult,
) -> Result<DualityReport> {
    if dual_problem.n_source() != problem.n_target() || dual_problem.mu0.points != problem.nu0.points {
        return Err(DiagnosticsError::InvalidInput("dual source grid differs from the target grid".into()));
    }
    if dual_result.phi.len() != dual_problem.n_source() || result.phi.len() != problem.n_source() {
        return Err(DiagnosticsError::InvalidInput("results do not match their problems".into()));
    }

    let xs = problem.mu0.coords_f64();
    let ps = problem.nu0.coords_f64();
    let total = xs.len() * ps.len();
    let stride = total.div_ceil(SYMMETRY_SAMPLES).max(1);
    let precondition_residual = (0..total)
        .step_by(stride)
        .map(|k| {
            let (i, j) = (k / ps.len(), k % ps.len());
            (problem.cost.eval(&xs[i], &ps[j]) - dual_problem.cost.eval(&ps[j], &xs[i])).abs()
        })
        .fold(0.0, f64::max);

    let (phic, _) = c_transform_values(problem, &result.phi.values, Direction::SourceToTarget);
    let f = kontorovich_value(problem, &result.phi)?;
    let fd = kontorovich_value(dual_problem, &PotentialField::on_source(dual_problem, phic.clone())?)?;

    let diff: Vec<f64> = dual_result.phi.values.iter().zip(&phic).map(|(a, b)| a - b).collect();
    let (lo, hi) = diff.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
    Ok(DualityReport {
        functional_gap: (f - fd).abs(),
        potential_gap: 0.5 * (hi - lo),
        shift: 0.5 * (hi + lo),
        precondition_residual,
    })
}
