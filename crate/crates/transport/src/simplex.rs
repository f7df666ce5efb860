//! Transportation simplex (u-v method) used as an exact oracle for the discrete dual problem.

use serde::Serialize;

use crate::error::{Result, TransportError};
use crate::plan::{canonical_duals, Plan};
use crate::problem::{TransportProblem, MASS_TOL};

/// Default bound on either grid size.
pub const DEFAULT_SIZE_CAP: usize = 400;

/// Consecutive degenerate pivots after which entering cells are chosen by Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LpConfig {
    pub size_cap: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self { size_cap: DEFAULT_SIZE_CAP }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LpSolution {
    pub plan: Plan,
    /// `Σ c_ij π_ij` of the returned plan.
    pub primal_value: f64,
    /// Canonical optimal potentials, `φ` mean zero under `μ₀` and `ψ = φ^c`.
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub pivots: usize,
}

struct Basis {
    rows: usize,
    cols: usize,
    cells: Vec<(usize, usize)>,
    flow: Vec<f64>,
}

impl Basis {
    /// Northwest-corner rule; always yields `rows + cols − 1` cells (some possibly degenerate).
    fn northwest(supply: &[f64], demand: &[f64]) -> Self {
        let (rows, cols) = (supply.len(), demand.len());
        let (mut s, mut d) = (supply.to_vec(), demand.to_vec());
        let (mut i, mut j) = (0, 0);
        let mut cells = Vec::with_capacity(rows + cols - 1);
        let mut flow = Vec::with_capacity(rows + cols - 1);
        loop {
            let x = s[i].min(d[j]).max(0.0);
            cells.push((i, j));
            flow.push(x);
            s[i] -= x;
            d[j] -= x;
            if i == rows - 1 && j == cols - 1 {
                break;
            }
            if i == rows - 1 {
                j += 1;
            } else if j == cols - 1 || s[i] <= d[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { rows, cols, cells, flow }
    }

    /// Adjacency of the spanning tree: node `i < rows` is a row, `rows + j` a column.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.rows + self.cols];
        for (k, &(i, j)) in self.cells.iter().enumerate() {
            adj[i].push((self.rows + j, k));
            adj[self.rows + j].push((i, k));
        }
        adj
    }

    /// Duals with `u_0 = 0` and `u_i + v_j = c_ij` on basic cells.
    fn duals(&self, problem: &TransportProblem, adj: &[Vec<(usize, usize)>]) -> (Vec<f64>, Vec<f64>) {
        let mut u = vec![f64::NAN; self.rows];
        let mut v = vec![f64::NAN; self.cols];
        u[0] = 0.0;
        let mut stack = vec![0];
        let mut seen = vec![false; self.rows + self.cols];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for &(b, k) in &adj[a] {
                if seen[b] {
                    continue;
                }
                seen[b] = true;
                let (i, j) = self.cells[k];
                if b >= self.rows {
                    v[j] = problem.c(i, j) - u[i];
                } else {
                    u[i] = problem.c(i, j) - v[j];
                }
                stack.push(b);
            }
        }
        (u, v)
    }

    /// Basic cells on the tree path from row `i` to column `j`, in order.
    fn path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let n = self.rows + self.cols;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[i] = true;
        let mut queue = std::collections::VecDeque::from([i]);
        let goal = self.rows + j;
        while let Some(a) = queue.pop_front() {
            if a == goal {
                break;
            }
            for &(b, k) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    parent[b] = Some((a, k));
                    queue.push_back(b);
                }
            }
        }
        let mut cells = Vec::new();
        let mut at = goal;
        while let Some((a, k)) = parent[at] {
            cells.push(k);
            at = a;
        }
        cells.reverse();
        cells
    }
}

/// Solves `max Σ c_ij π_ij` over plans with marginals `(μ₀, W ν₀)`.
pub fn lp_oracle(problem: &TransportProblem, config: LpConfig) -> Result<LpSolution> {
    let (n, m) = (problem.n_source(), problem.n_target());
    if n > config.size_cap || m > config.size_cap {
        return Err(TransportError::SizeCapExceeded { rows: n, cols: m, cap: config.size_cap });
    }
    let supply = problem.source_mass().to_vec();
    let demand = problem.target_mass();
    let (sm, tm) = (supply.iter().sum::<f64>(), demand.iter().sum::<f64>());
    if (sm - tm).abs() > MASS_TOL {
        return Err(TransportError::InfeasibleMarginals { source_mass: sm, target_mass: tm });
    }

    let scale = problem.matrix().iter().fold(1.0_f64, |a, c| a.max(c.abs()));
    let tol = 1e-12 * scale;
    let mut basis = Basis::northwest(&supply, &demand);
    let mut in_basis = vec![false; n * m];
    for &(i, j) in &basis.cells {
        in_basis[i * m + j] = true;
    }
    let mut pivots = 0;
    let mut degenerate_run = 0;
    let limit = 200 * (n + m) * (n + m) + 10_000;

    loop {
        let adj = basis.adjacency();
        let (u, v) = basis.duals(problem, &adj);
        let bland = degenerate_run >= DEGENERATE_LIMIT;
        let mut entering: Option<(usize, usize)> = None;
        let mut best = tol;
        'scan: for i in 0..n {
            for j in 0..m {
                if in_basis[i * m + j] {
                    continue;
                }
                let r = problem.c(i, j) - u[i] - v[j];
                if r > best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = r;
                }
            }
        }
        let Some((ei, ej)) = entering else { break };
        if pivots >= limit {
            return Err(TransportError::InvalidProblem("simplex pivot limit reached".into()));
        }

        // Cycle: entering cell +, path cells alternate starting with − next to row `ei`.
        let path = basis.path(&adj, ei, ej);
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for &k in path.iter().step_by(2) {
            let f = basis.flow[k];
            let better = f < theta || (f == theta && basis.cells[k] < basis.cells[leaving]);
            if better {
                theta = f;
                leaving = k;
            }
        }
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 {
                basis.flow[k] = (basis.flow[k] - theta).max(0.0);
            } else {
                basis.flow[k] += theta;
            }
        }
        let (li, lj) = basis.cells[leaving];
        in_basis[li * m + lj] = false;
        in_basis[ei * m + ej] = true;
        basis.cells[leaving] = (ei, ej);
        basis.flow[leaving] = theta;
        degenerate_run = if theta > 0.0 { 0 } else { degenerate_run + 1 };
        pivots += 1;
    }

    let mut dense = vec![0.0; n * m];
    for (&(i, j), &f) in basis.cells.iter().zip(&basis.flow) {
        dense[i * m + j] += f;
    }
    let plan = Plan::from_dense(n, m, &dense);
    let primal_value = plan.correlation(problem);
    let (phi, psi) = canonical_duals(problem, &plan);
    Ok(LpSolution { plan, primal_value, phi, psi, pivots })
}
