//! Lipschitz constants of normalized valuations on a face.

use nacy_polyhedral::{q_to_f64, Face};

use crate::section::TropicalSection;

/// Norm used to measure slopes on a face.
pub const CHART: &str = "euclidean";

/// Largest Euclidean norm of a term exponent projected to the tangent space of the face, over the level.
///
/// `x ↦ l⁻¹ val(x)` is a minimum of affine functions whose gradients along the face are these
/// projections, so the maximum bounds its slope.
pub fn lipschitz_bound(section: &TropicalSection, face: &Face) -> f64 {
    let dirs: Vec<Vec<f64>> = face.directions().iter().map(|d| d.iter().map(q_to_f64).collect()).collect();
    let basis = orthonormalize(&dirs);
    let best = section
        .terms
        .iter()
        .map(|t| {
            let a: Vec<f64> = t.exponent.iter().map(|&x| x as f64).collect();
            basis.iter().map(|e| dot(e, &a).powi(2)).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    best / f64::from(section.level)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthonormalize(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for e in &out {
            let c = dot(&w, e);
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi -= c * ei;
            }
        }
        let n = dot(&w, &w).sqrt();
        if n > 1e-14 {
            out.push(w.iter().map(|x| x / n).collect());
        }
    }
    out
}
