//! Sparse transport plans and the canonical choice of optimal dual potentials.

use nacy_polyhedral::pairwise_sum;
use serde::Serialize;

use crate::problem::{c_transform_values, Direction, TransportProblem};

/// Masses below this (relative to the total) are treated as absent from the support.
pub const SUPPORT_TOL: f64 = 1e-13;

/// Nonzero entries `(i, j, π_ij)` of a plan between `rows` source and `cols` target points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plan {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Plan {
    pub fn from_dense(rows: usize, cols: usize, dense: &[f64]) -> Self {
        let entries = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = dense[i * cols + j];
                (v > SUPPORT_TOL).then_some((i, j, v))
            })
            .collect();
        Self { rows, cols, entries }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for &(i, _, v) in &self.entries {
            out[i] += v;
        }
        out
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for &(_, j, v) in &self.entries {
            out[j] += v;
        }
        out
    }

    /// `Σ c(x_i, p_j) π_ij`.
    pub fn correlation(&self, problem: &TransportProblem) -> f64 {
        pairwise_sum(&self.entries.iter().map(|&(i, j, v)| problem.c(i, j) * v).collect::<Vec<_>>())
    }

    /// Largest deviation of the marginals from `(μ₀, W ν₀)`.
    pub fn marginal_error(&self, problem: &TransportProblem) -> f64 {
        let r = self.row_sums().iter().zip(problem.source_mass()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let c = self.col_sums().iter().zip(problem.target_mass()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        r.max(c)
    }
}

/// Optimal dual potentials `(φ, ψ = φ^c)` chosen independently of which optimal plan was found.
///
/// The optimal duals are exactly the feasible pairs (`φ_i + ψ_j ≥ c_ij`) that are tight on the
/// support of any one optimal plan. With `φ_0` pinned these difference constraints have a least
/// and a greatest solution; their midpoint is returned, transformed once more into `P_c` and
/// shifted to `∫ φ dμ₀ = 0`.
pub fn canonical_duals(problem: &TransportProblem, plan: &Plan) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = (problem.n_source(), problem.n_target());
    let mut support: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j, _) in &plan.entries {
        support[i].push(j);
    }
    let rounds = n + m + 2;
    let tol = 1e-13;

    // Least solution of u_i − v_j ≥ c_ij (all pairs), u_i − v_j ≤ c_ij (support), u_0 = 0,
    // in the variables u = φ and v = −ψ: longest paths from u_0.
    let mut u = vec![f64::NEG_INFINITY; n];
    let mut v = vec![f64::NEG_INFINITY; m];
    u[0] = 0.0;
    for _ in 0..rounds {
        let mut changed = false;
        for i in 0..n {
            for &j in &support[i] {
                let cand = u[i] - problem.c(i, j);
                if cand > v[j] + tol {
                    v[j] = cand;
                    changed = true;
                }
            }
        }
        for i in 1..n {
            let best = (0..m).map(|j| v[j] + problem.c(i, j)).fold(f64::NEG_INFINITY, f64::max);
            if best > u[i] + tol {
                u[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Greatest solution: longest paths into u_0, negated.
    let mut ru = vec![f64::NEG_INFINITY; n];
    let mut rv = vec![f64::NEG_INFINITY; m];
    ru[0] = 0.0;
    for _ in 0..rounds {
        let mut changed = false;
        for j in 0..m {
            let best = (0..n).map(|i| problem.c(i, j) + ru[i]).fold(f64::NEG_INFINITY, f64::max);
            if best > rv[j] + tol {
                rv[j] = best;
                changed = true;
            }
        }
        for i in 1..n {
            let best = support[i].iter().map(|&j| rv[j] - problem.c(i, j)).fold(f64::NEG_INFINITY, f64::max);
            if best > ru[i] + tol {
                ru[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let phi: Vec<f64> = (0..n).map(|i| 0.5 * (u[i] - ru[i])).collect();
    let (psi, _) = c_transform_values(problem, &phi, Direction::SourceToTarget);
    let (phi, _) = c_transform_values(problem, &psi, Direction::TargetToSource);
    normalize(problem, phi)
}

/// Shifts `φ` to mean zero under `μ₀` and returns it with `φ^c`.
pub fn normalize(problem: &TransportProblem, phi: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mean = pairwise_sum(&phi.iter().zip(problem.source_mass()).map(|(f, w)| f * w).collect::<Vec<_>>());
    let phi: Vec<f64> = phi.iter().map(|f| f - mean).collect();
    let (psi, _) = c_transform_values(problem, &phi, Direction::SourceToTarget);
    (phi, psi)
}

/// Feasible plan built greedily from pairs in increasing order of `φ_i + ψ_j − c_ij`.
pub fn greedy_plan(problem: &TransportProblem, phi: &[f64], psi: &[f64]) -> Plan {
    let (n, m) = (problem.n_source(), problem.n_target());
    let mut pairs: Vec<(f64, usize, usize)> =
        (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| (phi[i] + psi[j] - problem.c(i, j), i, j)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut supply = problem.source_mass().to_vec();
    let mut demand = problem.target_mass();
    let mut entries = Vec::new();
    for (_, i, j) in pairs {
        let t = supply[i].min(demand[j]);
        if t > 0.0 {
            entries.push((i, j, t));
            supply[i] -= t;
            demand[j] -= t;
        }
    }
    entries.sort_by_key(|&(i, j, _)| (i, j));
    Plan { rows: n, cols: m, entries }
}
