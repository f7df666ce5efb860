//! Normalized lattice-point counts `|B(l⁻¹Z)| · n! / lⁿ` against `(Lⁿ)`.

use nacy_polyhedral::{rational_points, IntegralPolyhedralComplex};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatticeCount {
    pub level: u32,
    pub count: usize,
    pub normalized: f64,
    pub rel_error: f64,
}

/// One row per level; `n` is the dimension of the complex.
pub fn lattice_count_asymptote(complex: &IntegralPolyhedralComplex, ln_norm: f64, levels: &[u32]) -> Vec<LatticeCount> {
    let n = complex.dim() as i32;
    let fact: f64 = (1..=n).map(f64::from).product();
    levels
        .iter()
        .map(|&level| {
            let count = rational_points(complex, level).len();
            let normalized = count as f64 * fact / f64::from(level).powi(n);
            LatticeCount { level, count, normalized, rel_error: (normalized - ln_norm).abs() / ln_norm }
        })
        .collect()
}

/// Weighted variant: each point counts with its multiplicity, as in the intermediate family.
pub fn weighted_count(multiplicities: &[u64], level: u32, n: u32, ln_norm: f64) -> LatticeCount {
    let fact: f64 = (1..=n).map(f64::from).product();
    let count: u64 = multiplicities.iter().sum();
    let normalized = count as f64 * fact / f64::from(level).powi(n as i32);
    LatticeCount { level, count: count as usize, normalized, rel_error: (normalized - ln_norm).abs() / ln_norm }
}
