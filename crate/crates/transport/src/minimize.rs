//! Minimization of the Kontorovich functional over `P_c`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TransportError};
use crate::plan::{canonical_duals, greedy_plan, normalize, Plan};
use crate::problem::{c_transform_values, functional, Direction, PotentialField, TransportProblem};
use crate::ssp::solve_ssp;

/// Iterations without an improvement of at least `tol` after which the relaxed method stops.
const STALL_WINDOW: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact dual ascent: successive shortest paths on the discrete problem, then canonical duals.
    #[default]
    Ascent,
    /// Damped subgradient steps, each followed by the double c-transform.
    Relaxed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iter: usize,
    pub tol: f64,
    pub damping: f64,
    /// Return a transport plan and the duality gap.
    pub plan: bool,
    /// Starting potential on the source grid (relaxed method only).
    pub initial: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { method: Method::Ascent, max_iter: 20_000, tol: 1e-12, damping: 0.5, plan: true, initial: None }
    }
}

impl SolverConfig {
    fn validate(&self, problem: &TransportProblem) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(TransportError::InvalidProblem("tol must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(TransportError::InvalidProblem("damping must lie in (0, 1]".into()));
        }
        if let Some(f) = &self.initial {
            if f.len() != problem.n_source() {
                return Err(TransportError::GridMismatch { expected: problem.n_source(), got: f.len() });
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(TransportError::NonFinite("initial potential"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TransportResult {
    pub phi: PotentialField,
    /// `φ^c` on the target grid.
    pub psi: PotentialField,
    /// For every target point, the source index attaining `φ^c`.
    pub argmax: Vec<usize>,
    pub value: f64,
    pub plan: Option<Plan>,
    /// `value − Σ c π` for the returned plan; `None` without a plan.
    pub gap: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
}

pub fn minimize_kontorovich(problem: &TransportProblem, config: &SolverConfig) -> Result<TransportResult> {
    config.validate(problem)?;
    let (phi, iterations, converged, exact_plan) = match config.method {
        Method::Ascent => {
            let out = solve_ssp(problem)?;
            let (phi, _) = canonical_duals(problem, &out.plan);
            (phi, out.augmentations, true, Some(out.plan))
        }
        Method::Relaxed => {
            let (phi, it, conv) = relaxed(problem, config);
            (normalize(problem, phi).0, it, conv, None)
        }
    };
    let (psi, argmax) = c_transform_values(problem, &phi, Direction::SourceToTarget);
    let value = functional(problem, &phi, &psi);
    let plan = config.plan.then(|| exact_plan.unwrap_or_else(|| greedy_plan(problem, &phi, &psi)));
    let gap = plan.as_ref().map(|p| value - p.correlation(problem));
    Ok(TransportResult {
        phi: PotentialField::on_source(problem, phi)?,
        psi: PotentialField::on_target(problem, psi)?,
        argmax,
        value,
        plan,
        gap,
        iterations,
        converged,
        method: config.method,
    })
}

/// Best iterate of damped subgradient descent on `F`, kept inside `P_c` and at mean zero.
///
/// Steps follow Polyak's rule with the best greedy-plan correlation seen so far standing in for
/// the unknown optimum. This is an approximate method: the returned gap certifies its accuracy.
fn relaxed(problem: &TransportProblem, config: &SolverConfig) -> (Vec<f64>, usize, bool) {
    let n = problem.n_source();
    let mass = problem.source_mass();
    let target = problem.target_mass();

    let start = config.initial.clone().unwrap_or_else(|| vec![0.0; n]);
    let (psi, _) = c_transform_values(problem, &normalize(problem, start).0, Direction::SourceToTarget);
    let (mut phi, _) = c_transform_values(problem, &psi, Direction::TargetToSource);
    let mut best_phi = phi.clone();
    let mut best = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut stall = 0;
    for k in 0..config.max_iter {
        let (psi, argmax) = c_transform_values(problem, &phi, Direction::SourceToTarget);
        let value = functional(problem, &phi, &psi);
        lower = lower.max(greedy_plan(problem, &phi, &psi).correlation(problem));
        if value < best - config.tol {
            stall = 0;
        } else {
            stall += 1;
        }
        if value < best {
            best = value;
            best_phi.clone_from(&phi);
        }
        if stall >= STALL_WINDOW || best - lower <= config.tol {
            return (best_phi, k, true);
        }
        let mut g = mass.to_vec();
        for (j, &i) in argmax.iter().enumerate() {
            g[i] -= target[j];
        }
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if g2 == 0.0 {
            return (best_phi, k, true);
        }
        let step = config.damping * (value - lower).max(config.tol) / g2;
        let moved: Vec<f64> = phi.iter().zip(&g).map(|(f, gi)| f - step * gi).collect();
        let (psi, _) = c_transform_values(problem, &moved, Direction::SourceToTarget);
        phi = normalize(problem, c_transform_values(problem, &psi, Direction::TargetToSource).0).0;
    }
    (best_phi, config.max_iter, false)
}
