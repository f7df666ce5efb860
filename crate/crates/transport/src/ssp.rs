//! Successive shortest paths for the dense transportation problem.
//!
//! Maximizing `Σ c_ij π_ij` is solved as a min-cost flow with arc costs `max c − c_ij ≥ 0`.
//! Node potentials keep reduced costs non-negative, so each augmenting path is found by a dense
//! Dijkstra over the residual graph (forward arcs source → target, reverse arcs where flow is positive).

use crate::error::{Result, TransportError};
use crate::plan::Plan;
use crate::problem::TransportProblem;

/// Supplies, demands and reverse capacities below this are zero.
const EPS: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct SspOutcome {
    pub plan: Plan,
    pub augmentations: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Prev {
    None,
    /// Reached by the forward arc from this source.
    Source(usize),
    /// Reached by the reverse arc from this target.
    Target(usize),
}

pub fn solve_ssp(problem: &TransportProblem) -> Result<SspOutcome> {
    let (n, m) = (problem.n_source(), problem.n_target());
    let mut supply = problem.source_mass().to_vec();
    let mut demand = problem.target_mass();
    let cmax = problem.matrix().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let k = |i: usize, j: usize| cmax - problem.c(i, j);
    let mut flow = vec![0.0; n * m];
    let mut pot_s = vec![0.0; n];
    let mut pot_t = vec![0.0; m];
    let mut dist_s = vec![0.0; n];
    let mut dist_t = vec![0.0; m];
    let mut done_s = vec![false; n];
    let mut done_t = vec![false; m];
    let mut prev_s = vec![Prev::None; n];
    let mut prev_t = vec![Prev::None; m];
    let mut augmentations = 0;
    let limit = 64 * (n + m) * (n + m) + 1024;

    while supply.iter().any(|&s| s > EPS) {
        if augmentations > limit {
            return Err(TransportError::InvalidProblem("shortest-path augmentation did not terminate".into()));
        }
        for i in 0..n {
            dist_s[i] = if supply[i] > EPS { 0.0 } else { f64::INFINITY };
            done_s[i] = false;
            prev_s[i] = Prev::None;
        }
        for j in 0..m {
            dist_t[j] = f64::INFINITY;
            done_t[j] = false;
            prev_t[j] = Prev::None;
        }
        let sink = loop {
            // Closest unsettled node; sources before targets and lower indices first on ties.
            let mut best = f64::INFINITY;
            let mut pick: Option<(bool, usize)> = None;
            for i in 0..n {
                if !done_s[i] && dist_s[i] < best {
                    best = dist_s[i];
                    pick = Some((true, i));
                }
            }
            for j in 0..m {
                if !done_t[j] && dist_t[j] < best {
                    best = dist_t[j];
                    pick = Some((false, j));
                }
            }
            let Some((is_source, v)) = pick else {
                return Err(TransportError::InfeasibleMarginals {
                    source_mass: supply.iter().sum(),
                    target_mass: demand.iter().sum(),
                });
            };
            if is_source {
                done_s[v] = true;
                for j in 0..m {
                    if done_t[j] {
                        continue;
                    }
                    let rc = (k(v, j) + pot_s[v] - pot_t[j]).max(0.0);
                    if best + rc < dist_t[j] {
                        dist_t[j] = best + rc;
                        prev_t[j] = Prev::Source(v);
                    }
                }
            } else {
                done_t[v] = true;
                if demand[v] > EPS {
                    break v;
                }
                for i in 0..n {
                    if done_s[i] || flow[i * m + v] <= EPS {
                        continue;
                    }
                    let rc = (-k(i, v) + pot_t[v] - pot_s[i]).max(0.0);
                    if best + rc < dist_s[i] {
                        dist_s[i] = best + rc;
                        prev_s[i] = Prev::Target(v);
                    }
                }
            }
        };
        let d = dist_t[sink];
        for i in 0..n {
            pot_s[i] += dist_s[i].min(d);
        }
        for j in 0..m {
            pot_t[j] += dist_t[j].min(d);
        }
        // Bottleneck along the path.
        let mut delta = demand[sink];
        let mut j = sink;
        let start = loop {
            let Prev::Source(i) = prev_t[j] else { unreachable!("targets on the path are reached from sources") };
            match prev_s[i] {
                Prev::Target(jj) => {
                    delta = delta.min(flow[i * m + jj]);
                    j = jj;
                }
                _ => break i,
            }
        };
        delta = delta.min(supply[start]);
        let mut j = sink;
        loop {
            let Prev::Source(i) = prev_t[j] else { unreachable!() };
            flow[i * m + j] += delta;
            match prev_s[i] {
                Prev::Target(jj) => {
                    let f = &mut flow[i * m + jj];
                    *f -= delta;
                    if *f <= EPS {
                        *f = 0.0;
                    }
                    j = jj;
                }
                _ => break,
            }
        }
        supply[start] -= delta;
        if supply[start] <= EPS {
            supply[start] = 0.0;
        }
        demand[sink] -= delta;
        if demand[sink] <= EPS {
            demand[sink] = 0.0;
        }
        augmentations += 1;
    }
    Ok(SspOutcome { plan: Plan::from_dense(n, m, &flow), augmentations })
}
