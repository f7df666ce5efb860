//! Relative volumes of level-`l` Fubini-Study norms and their scaled limits.

use nacy_cost::ThetaFamily;
use nacy_polyhedral::pairwise_sum;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, TransportError};
use crate::problem::PotentialField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelativeVolume {
    pub vol: f64,
    /// `n!/l^{n+1} · vol`, which tends to `E(φ) − E(ψ)`.
    pub scaled: f64,
}

/// `φ^c_l(p) = max_x (−l⁻¹ val_x(θ_p^l) − φ(x))` for every section at level `l`.
pub fn level_transform(phi: &PotentialField, family: &ThetaFamily, l: u32) -> Result<Vec<f64>> {
    let count = family.sections(l)?.len();
    let xs = phi.support.coords_f64();
    let inv = 1.0 / f64::from(l);
    (0..count)
        .into_par_iter()
        .map(|p| {
            let mut best = f64::NEG_INFINITY;
            for (x, f) in xs.iter().zip(&phi.values) {
                let v = -inv * family.val(l, p, x)? - f;
                if v > best {
                    best = v;
                }
            }
            Ok(best)
        })
        .collect()
}

pub fn relative_volume_sum(
    phi: &PotentialField,
    psi: &PotentialField,
    family: &ThetaFamily,
    l: u32,
) -> Result<RelativeVolume> {
    if phi.len() != psi.len() {
        return Err(TransportError::GridMismatch { expected: phi.len(), got: psi.len() });
    }
    if phi.is_empty() {
        return Err(TransportError::EmptyGrid);
    }
    let mult = family.multiplicities(l)?;
    let a = level_transform(phi, family, l)?;
    let b = level_transform(psi, family, l)?;
    let terms: Vec<f64> = a.iter().zip(&b).zip(&mult).map(|((x, y), &k)| k as f64 * (y - x)).collect();
    let vol = f64::from(l) * pairwise_sum(&terms);
    let n = family.dim() as i32;
    let factorial: f64 = (1..=family.dim()).map(|k| k as f64).product();
    let scaled = factorial / f64::from(l).powi(n + 1) * vol;
    Ok(RelativeVolume { vol, scaled })
}
