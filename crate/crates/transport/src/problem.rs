//! Transport problems, potentials on grids, c-transforms and the Kontorovich functional.

use std::sync::Arc;

use nacy_cost::CostFunction;
use nacy_polyhedral::{pairwise_sum, DiscreteMeasure, IntegralPolyhedralComplex};
use rayon::prelude::*;

use crate::error::{Result, TransportError};

/// Tolerance for the unit-mass checks on `μ₀` and `W·ν₀`.
pub const MASS_TOL: f64 = 1e-9;

/// `(c, μ₀, ν₀, W, (Lⁿ))` with the cost matrix on the two grids evaluated once.
#[derive(Clone, Debug)]
pub struct TransportProblem {
    pub cost: CostFunction,
    pub mu0: Arc<DiscreteMeasure>,
    pub nu0: Arc<DiscreteMeasure>,
    /// `W(p_j)` per target point.
    pub weight: Vec<f64>,
    pub ln_norm: f64,
    matrix: Arc<Vec<f64>>,
}

impl TransportProblem {
    /// Validates masses (`μ₀(Sk) = 1`, `∫ W dν₀ = 1`), weights and `(Lⁿ)`; `weight = None` means `W ≡ 1`.
    pub fn new(
        cost: CostFunction,
        mu0: Arc<DiscreteMeasure>,
        nu0: Arc<DiscreteMeasure>,
        weight: Option<Vec<f64>>,
        ln_norm: f64,
    ) -> Result<Self> {
        if mu0.is_empty() || nu0.is_empty() {
            return Err(TransportError::EmptyGrid);
        }
        let weight = weight.unwrap_or_else(|| vec![1.0; nu0.len()]);
        if weight.len() != nu0.len() {
            return Err(TransportError::GridMismatch { expected: nu0.len(), got: weight.len() });
        }
        if weight.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(TransportError::InvalidProblem("weights must be finite and non-negative".into()));
        }
        if !(ln_norm.is_finite() && ln_norm > 0.0) {
            return Err(TransportError::InvalidProblem("(L^n) must be positive".into()));
        }
        let source_mass = mu0.total_mass();
        let target_mass = pairwise_sum(&weight.iter().zip(&nu0.weights).map(|(w, n)| w * n).collect::<Vec<_>>());
        if (source_mass - 1.0).abs() > MASS_TOL || (target_mass - 1.0).abs() > MASS_TOL {
            return Err(TransportError::InfeasibleMarginals { source_mass, target_mass });
        }
        let matrix = cost.matrix(&mu0, &nu0);
        if matrix.iter().any(|c| !c.is_finite()) {
            return Err(TransportError::NonFinite("cost matrix"));
        }
        Ok(Self { cost, mu0, nu0, weight, ln_norm, matrix: Arc::new(matrix) })
    }

    pub fn n_source(&self) -> usize {
        self.mu0.len()
    }

    pub fn n_target(&self) -> usize {
        self.nu0.len()
    }

    /// `c(x_i, p_j)`.
    #[inline]
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.nu0.len() + j]
    }

    /// Row-major cost matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Target marginal `W(p_j) ν₀(p_j)`.
    pub fn target_mass(&self) -> Vec<f64> {
        self.weight.iter().zip(&self.nu0.weights).map(|(w, n)| w * n).collect()
    }

    pub fn source_mass(&self) -> &[f64] {
        &self.mu0.weights
    }

    /// The problem with source and target exchanged and the cost `c^∨(p, x) = c(x, p)`.
    ///
    /// The new source measure is `W·ν₀` and the new weight is 1, so the swap keeps unit masses.
    pub fn dual(&self) -> Result<Self> {
        let mass = self.target_mass();
        let nu = DiscreteMeasure::new(self.nu0.points.clone(), self.nu0.faces.clone(), mass)?;
        Self::new(self.cost.swapped(), Arc::new(nu), self.mu0.clone(), None, self.ln_norm)
    }
}

/// Values of a function on the grid of one side of a problem.
#[derive(Clone, Debug)]
pub struct PotentialField {
    pub complex: Arc<IntegralPolyhedralComplex>,
    pub support: Arc<DiscreteMeasure>,
    pub values: Vec<f64>,
}

impl PotentialField {
    pub fn new(
        complex: Arc<IntegralPolyhedralComplex>,
        support: Arc<DiscreteMeasure>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != support.len() {
            return Err(TransportError::GridMismatch { expected: support.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TransportError::NonFinite("potential"));
        }
        Ok(Self { complex, support, values })
    }

    /// Potential on the source grid of a problem.
    pub fn on_source(problem: &TransportProblem, values: Vec<f64>) -> Result<Self> {
        Self::new(problem.cost.source.clone(), problem.mu0.clone(), values)
    }

    /// Potential on the target grid of a problem.
    pub fn on_target(problem: &TransportProblem, values: Vec<f64>) -> Result<Self> {
        Self::new(problem.cost.target.clone(), problem.nu0.clone(), values)
    }

    /// The declared sup-norm bound.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn shifted(&self, a: f64) -> Self {
        Self { values: self.values.iter().map(|v| v + a).collect(), ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `φ ↦ φ^c(p) = max_x c(x, p) − φ(x)`.
    SourceToTarget,
    /// `ψ ↦ ψ^c(x) = max_p c(x, p) − ψ(p)`.
    TargetToSource,
}

/// A c-transform together with the maximizing grid index for every output point.
#[derive(Clone, Debug)]
pub struct CTransform {
    pub field: PotentialField,
    pub argmax: Vec<usize>,
}

/// `max_k c(·) − f_k` over the opposite grid; ties go to the lowest index.
pub fn c_transform_values(problem: &TransportProblem, f: &[f64], direction: Direction) -> (Vec<f64>, Vec<usize>) {
    let (n, m) = (problem.n_source(), problem.n_target());
    match direction {
        Direction::SourceToTarget => (0..m)
            .into_par_iter()
            .map(|j| {
                let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
                for (i, fi) in f.iter().enumerate().take(n) {
                    let v = problem.c(i, j) - fi;
                    if v > best {
                        best = v;
                        arg = i;
                    }
                }
                (best, arg)
            })
            .unzip(),
        Direction::TargetToSource => (0..n)
            .into_par_iter()
            .map(|i| {
                let row = &problem.matrix()[i * m..(i + 1) * m];
                let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
                for (j, (c, fj)) in row.iter().zip(f).enumerate() {
                    let v = c - fj;
                    if v > best {
                        best = v;
                        arg = j;
                    }
                }
                (best, arg)
            })
            .unzip(),
    }
}

pub fn c_transform(f: &PotentialField, problem: &TransportProblem, direction: Direction) -> Result<CTransform> {
    let (input_len, output) = match direction {
        Direction::SourceToTarget => (problem.n_source(), (problem.cost.target.clone(), problem.nu0.clone())),
        Direction::TargetToSource => (problem.n_target(), (problem.cost.source.clone(), problem.mu0.clone())),
    };
    if f.is_empty() || input_len == 0 || output.1.is_empty() {
        return Err(TransportError::EmptyGrid);
    }
    if f.len() != input_len {
        return Err(TransportError::GridMismatch { expected: input_len, got: f.len() });
    }
    let (values, argmax) = c_transform_values(problem, &f.values, direction);
    Ok(CTransform { field: PotentialField::new(output.0, output.1, values)?, argmax })
}

fn opposite(d: Direction) -> Direction {
    match d {
        Direction::SourceToTarget => Direction::TargetToSource,
        Direction::TargetToSource => Direction::SourceToTarget,
    }
}

/// `(f^c)^c` on the side `f` lives on: the largest element of `P_c` below `f`.
pub fn project_pc(f: &PotentialField, problem: &TransportProblem, side: Direction) -> Result<PotentialField> {
    let once = c_transform(f, problem, side)?;
    Ok(c_transform(&once.field, problem, opposite(side))?.field)
}

fn check_source(problem: &TransportProblem, phi: &PotentialField) -> Result<()> {
    if phi.len() != problem.n_source() {
        return Err(TransportError::GridMismatch { expected: problem.n_source(), got: phi.len() });
    }
    Ok(())
}

/// `F(φ) = ∫ φ dμ₀ + ∫ W φ^c dν₀`, summed pairwise.
pub fn kontorovich_value(problem: &TransportProblem, phi: &PotentialField) -> Result<f64> {
    check_source(problem, phi)?;
    let (phic, _) = c_transform_values(problem, &phi.values, Direction::SourceToTarget);
    Ok(functional(problem, &phi.values, &phic))
}

pub(crate) fn functional(problem: &TransportProblem, phi: &[f64], phic: &[f64]) -> f64 {
    let a: Vec<f64> = phi.iter().zip(problem.source_mass()).map(|(f, m)| f * m).collect();
    let b: Vec<f64> = phic.iter().zip(problem.target_mass()).map(|(f, w)| f * w).collect();
    pairwise_sum(&a) + pairwise_sum(&b)
}

/// `E(φ) = −(Lⁿ) ∫ W φ^c dν₀`, with no further additive constant: `E = 0` exactly when `∫ W φ^c dν₀ = 0`.
pub fn ma_energy(problem: &TransportProblem, phi: &PotentialField) -> Result<f64> {
    check_source(problem, phi)?;
    let (phic, _) = c_transform_values(problem, &phi.values, Direction::SourceToTarget);
    let b: Vec<f64> = phic.iter().zip(problem.target_mass()).map(|(f, w)| f * w).collect();
    Ok(-problem.ln_norm * pairwise_sum(&b))
}
