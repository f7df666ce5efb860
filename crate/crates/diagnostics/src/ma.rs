//! Discrete real Monge-Ampère measures of potentials on a face grid.

use std::collections::BTreeMap;

use nacy_polyhedral::{IntegralPolyhedralComplex, Q};
use nacy_transport::PotentialField;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{DiagnosticsError, Result};

/// A cell is degenerate when its Hessian determinant is below this, relative to `(1 + max|u|)/h^2`.
const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaCell {
    /// Grid index of the centre node in the face chart.
    pub index: Vec<i64>,
    /// Discrete Monge-Ampère mass of the cell.
    pub mass: f64,
    /// `(mass − total/cells) / |total|`.
    pub residual: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaResidual {
    pub cells: Vec<MaCell>,
    pub total_mass: f64,
    /// Largest `|residual|`; 0 when the whole grid is flat.
    pub max_residual: f64,
    pub degenerate_count: usize,
}

/// Residual of `u` on the uniform 1D grid `u_k = u(k h)`, `k = 0..N`.
pub fn ma_residual_1d(values: &[f64], h: f64) -> Result<MaResidual> {
    let nodes = values.iter().enumerate().map(|(k, &v)| (vec![k as i64], v)).collect();
    ma_residual_nodes(&nodes, 1, h)
}

/// Residual of `u` on a rectangular grid `u[i][j] = u(i h, j h)`.
pub fn ma_residual_2d(values: &[Vec<f64>], h: f64) -> Result<MaResidual> {
    let nodes = values
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (vec![i as i64, j as i64], v)))
        .collect();
    ma_residual_nodes(&nodes, 2, h)
}

/// Residual of a potential restricted to the top cell `face` of `complex`, read on the grid of
/// barycentric spacing `h` (a unit fraction). Grid nodes missing from the potential's support
/// only remove the cells that need them.
pub fn ma_residual(phi: &PotentialField, complex: &IntegralPolyhedralComplex, face: usize, h: Q) -> Result<MaResidual> {
    let cell = complex
        .cells()
        .get(face)
        .ok_or_else(|| DiagnosticsError::InvalidInput(format!("no face {face}")))?;
    if !h.is_positive() || !(h.recip()).is_integer() {
        return Err(DiagnosticsError::InvalidInput("h must be 1/N for a positive integer N".into()));
    }
    let dim = cell.dim();
    if !(1..=2).contains(&dim) {
        return Err(DiagnosticsError::InvalidInput(format!("faces of dimension {dim} are not supported")));
    }
    let n = h.recip();
    let mut nodes = BTreeMap::new();
    for (x, &v) in phi.support.points.iter().zip(&phi.values) {
        let Some(bary) = cell.barycentric(x) else { continue };
        let idx: Option<Vec<i64>> =
            bary[1..].iter().map(|b| (*b * n).is_integer().then(|| (*b * n).to_integer())).collect();
        if let Some(idx) = idx {
            nodes.insert(idx, v);
        }
    }
    if nodes.is_empty() {
        return Err(DiagnosticsError::InvalidInput(format!("potential has no grid points on face {face}")));
    }
    let h = 1.0 / n.to_integer() as f64;
    ma_residual_nodes(&nodes, dim, h)
}

fn ma_residual_nodes(nodes: &BTreeMap<Vec<i64>, f64>, dim: usize, h: f64) -> Result<MaResidual> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(DiagnosticsError::InvalidInput("grid spacing must be positive".into()));
    }
    if nodes.values().any(|v| !v.is_finite()) {
        return Err(DiagnosticsError::InvalidInput("non-finite potential".into()));
    }
    let scale = 1.0 + nodes.values().fold(0.0_f64, |a, v| a.max(v.abs()));
    let threshold = DEGENERATE_TOL * scale / (h * h);
    let at = |idx: &[i64], d: &[i64]| -> Option<f64> {
        let k: Vec<i64> = idx.iter().zip(d).map(|(a, b)| a + b).collect();
        nodes.get(&k).copied()
    };
    let mut raw: Vec<(Vec<i64>, f64)> = Vec::new();
    for idx in nodes.keys() {
        let det = match dim {
            1 => {
                let (Some(a), Some(b), Some(c)) = (at(idx, &[-1]), at(idx, &[0]), at(idx, &[1])) else { continue };
                (a - 2.0 * b + c) / (h * h)
            }
            _ => {
                let get = |i: i64, j: i64| at(idx, &[i, j]);
                let (Some(c), Some(xp), Some(xm), Some(yp), Some(ym)) =
                    (get(0, 0), get(1, 0), get(-1, 0), get(0, 1), get(0, -1))
                else {
                    continue;
                };
                let (Some(pp), Some(pm), Some(mp), Some(mm)) = (get(1, 1), get(1, -1), get(-1, 1), get(-1, -1)) else {
                    continue;
                };
                let uxx = (xp - 2.0 * c + xm) / (h * h);
                let uyy = (yp - 2.0 * c + ym) / (h * h);
                let uxy = (pp - pm - mp + mm) / (4.0 * h * h);
                uxx * uyy - uxy * uxy
            }
        };
        raw.push((idx.clone(), det));
    }
    if raw.is_empty() {
        return Err(DiagnosticsError::InvalidInput("grid has no interior cells".into()));
    }
    let cell_volume = h.powi(dim as i32);
    let total: f64 = raw.iter().map(|(_, d)| d * cell_volume).sum();
    let sign = if total < 0.0 { -1.0 } else { 1.0 };
    let det_threshold = if dim == 1 { threshold } else { threshold * threshold };
    let count = raw.len() as f64;
    let mut cells = Vec::with_capacity(raw.len());
    let mut max_residual = 0.0_f64;
    let mut degenerate_count = 0;
    let all_flat = total.abs() <= det_threshold * cell_volume * count;
    for (index, det) in raw {
        let mass = det * cell_volume;
        let degenerate = all_flat || sign * det <= det_threshold;
        let residual = if all_flat { 0.0 } else { (mass - total / count) / total.abs() };
        if degenerate {
            degenerate_count += 1;
        }
        max_residual = max_residual.max(residual.abs());
        cells.push(MaCell { index, mass, residual, degenerate });
    }
    Ok(MaResidual { cells, total_mass: total, max_residual, degenerate_count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_has_zero_residual() {
        let h = 1.0 / 64.0;
        let u: Vec<f64> = (0..=64).map(|k| {
            let x = k as f64 * h;
            0.5 * x * x
        }).collect();
        let r = ma_residual_1d(&u, h).unwrap();
        assert_eq!(r.cells.len(), 63);
        assert_eq!(r.degenerate_count, 0);
        assert!(r.max_residual < 1e-10);
        assert!((r.total_mass - 63.0 * h).abs() < 1e-10);
    }

    #[test]
    fn affine_is_flagged() {
        let u: Vec<f64> = (0..=32).map(|k| 3.0 - 0.7 * k as f64 / 32.0).collect();
        let r = ma_residual_1d(&u, 1.0 / 32.0).unwrap();
        assert_eq!(r.degenerate_count, r.cells.len());
        assert_eq!(r.max_residual, 0.0);
        let flat2: Vec<Vec<f64>> = (0..8).map(|i| (0..8).map(|j| 0.25 * i as f64 - j as f64).collect()).collect();
        let r = ma_residual_2d(&flat2, 0.125).unwrap();
        assert_eq!(r.degenerate_count, 36);
    }

    #[test]
    fn paraboloid_in_two_dimensions() {
        let h = 0.1;
        let u: Vec<Vec<f64>> =
            (0..11).map(|i| (0..11).map(|j| { let (x, y) = (i as f64 * h, j as f64 * h); x * x + x * y + y * y }).collect()).collect();
        let r = ma_residual_2d(&u, h).unwrap();
        // det D²u = 2·2 − 1 = 3 everywhere.
        assert!(r.cells.iter().all(|c| (c.mass / (h * h) - 3.0).abs() < 1e-9));
        assert!(r.max_residual < 1e-12);
    }

    #[test]
    fn concave_orientation_is_accepted() {
        let h = 1.0 / 16.0;
        let u: Vec<f64> = (0..=16).map(|k| -(k as f64 * h).powi(2)).collect();
        let r = ma_residual_1d(&u, h).unwrap();
        assert_eq!(r.degenerate_count, 0);
        assert!(r.total_mass < 0.0);
    }

    #[test]
    fn bad_inputs() {
        assert!(ma_residual_1d(&[0.0, 1.0], 0.5).is_err());
        assert!(ma_residual_1d(&[0.0, 1.0, 2.0], 0.0).is_err());
    }
}
