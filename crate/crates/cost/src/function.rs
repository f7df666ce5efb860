//! Evaluable cost functions `c(x, p)` on source × target complexes.

use std::fmt::Debug;
use std::sync::Arc;

use nacy_polyhedral::rational::to_f64_vec;
use nacy_polyhedral::{DiscreteMeasure, IntegralPolyhedralComplex, Q};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A deterministic map `(x, p) ↦ c(x, p)`.
pub trait CostKernel: Debug + Send + Sync {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64;
    fn name(&self) -> &'static str;
}

/// How a cost function was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Pairing,
    Fekete { levels: Vec<u32> },
    Abelian { rank: usize },
    Tabulated,
    Zero,
    Swapped { of: Box<Provenance> },
}

#[derive(Clone, Debug)]
pub struct CostFunction {
    pub source: Arc<IntegralPolyhedralComplex>,
    pub target: Arc<IntegralPolyhedralComplex>,
    pub kernel: Arc<dyn CostKernel>,
    pub lipschitz_x: f64,
    pub provenance: Provenance,
}

impl CostFunction {
    pub fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        self.kernel.eval(x, p)
    }

    /// Value together with the boundary flag: true when `p` is not interior to a top target cell,
    /// so the value is the continuous extension of the formula from an incident top cell.
    pub fn eval_flagged(&self, x: &[Q], p: &[Q]) -> (f64, bool) {
        let v = self.kernel.eval(&to_f64_vec(x), &to_f64_vec(p));
        (v, !self.target.is_interior_point(p))
    }

    /// The role-swapped cost `c^∨(p, x) = c(x, p)`.
    ///
    /// Only the pairing has a known Lipschitz constant in the new first argument; other
    /// swapped costs declare `+∞`.
    pub fn swapped(&self) -> CostFunction {
        let lipschitz_x = match self.provenance {
            Provenance::Pairing => self
                .source
                .vertices()
                .iter()
                .map(|v| to_f64_vec(v).iter().map(|x| x * x).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
            _ => f64::INFINITY,
        };
        CostFunction {
            source: self.target.clone(),
            target: self.source.clone(),
            kernel: Arc::new(Swapped(self.kernel.clone())),
            lipschitz_x,
            provenance: Provenance::Swapped { of: Box::new(self.provenance.clone()) },
        }
    }

    /// Dense row-major matrix `C[i][j] = c(x_i, p_j)`.
    pub fn matrix(&self, source: &DiscreteMeasure, target: &DiscreteMeasure) -> Vec<f64> {
        let xs = source.coords_f64();
        let ps = target.coords_f64();
        let m = ps.len();
        let mut out = vec![0.0; xs.len() * m];
        out.par_chunks_mut(m.max(1)).zip(xs.par_iter()).for_each(|(row, x)| {
            for (r, p) in row.iter_mut().zip(&ps) {
                *r = self.kernel.eval(x, p);
            }
        });
        out
    }
}

/// Exchanges the arguments of an inner kernel.
#[derive(Debug)]
pub struct Swapped(pub Arc<dyn CostKernel>);

impl CostKernel for Swapped {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        self.0.eval(p, x)
    }

    fn name(&self) -> &'static str {
        "swapped"
    }
}

/// `c ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroKernel;

impl CostKernel for ZeroKernel {
    fn eval(&self, _: &[f64], _: &[f64]) -> f64 {
        0.0
    }

    fn name(&self) -> &'static str {
        "zero"
    }
}

/// Ambient bilinear pairing `⟨x, p⟩`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PairingKernel;

impl CostKernel for PairingKernel {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        x.iter().zip(p).map(|(a, b)| a * b).sum()
    }

    fn name(&self) -> &'static str {
        "pairing"
    }
}

/// Values on a grid, looked up at the nearest grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedKernel {
    pub xs: Vec<Vec<f64>>,
    pub ps: Vec<Vec<f64>>,
    /// Row-major `values[i * ps.len() + j] = c(xs[i], ps[j])`.
    pub values: Vec<f64>,
}

fn nearest(points: &[Vec<f64>], y: &[f64]) -> usize {
    let d2 = |a: &[f64]| a.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
    (0..points.len()).min_by(|&a, &b| d2(&points[a]).total_cmp(&d2(&points[b]))).unwrap_or(0)
}

impl CostKernel for TabulatedKernel {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        self.values[nearest(&self.xs, x) * self.ps.len() + nearest(&self.ps, p)]
    }

    fn name(&self) -> &'static str {
        "tabulated"
    }
}

/// Zero cost between two complexes.
pub fn zero_cost(source: Arc<IntegralPolyhedralComplex>, target: Arc<IntegralPolyhedralComplex>) -> CostFunction {
    CostFunction { source, target, kernel: Arc::new(ZeroKernel), lipschitz_x: 0.0, provenance: Provenance::Zero }
}

/// Tabulated cost; the declared Lipschitz constant is the largest grid difference quotient in `x`.
pub fn tabulated_cost(
    source: Arc<IntegralPolyhedralComplex>,
    target: Arc<IntegralPolyhedralComplex>,
    table: TabulatedKernel,
) -> CostFunction {
    let m = table.ps.len();
    let mut lip: f64 = 0.0;
    for i in 0..table.xs.len() {
        for k in i + 1..table.xs.len() {
            let d = table.xs[i].iter().zip(&table.xs[k]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if d > 0.0 {
                for j in 0..m {
                    lip = lip.max((table.values[i * m + j] - table.values[k * m + j]).abs() / d);
                }
            }
        }
    }
    CostFunction { source, target, kernel: Arc::new(table), lipschitz_x: lip, provenance: Provenance::Tabulated }
}
