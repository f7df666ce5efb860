//! Intermediate complex-structure limits: simplex skeleton, base `B = ∪ Δ_k^∨`, weighted target.

use std::collections::BTreeMap;
use std::sync::Arc;

use nacy_cost::{pairing_cost, ThetaFamily};
use nacy_polyhedral::{pairwise_sum, qi, quadrature, DiscreteMeasure, Face, IntegralPolyhedralComplex, MeasureWeights, Q};
use nacy_transport::TransportProblem;
use nacy_tropical::{Label, MonomialTerm, TropicalSection};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{FamilyError, Result};
use crate::spec::Discretization;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntermediateData {
    /// Fiber dimension.
    pub n: u32,
    /// Skeleton dimension.
    pub m: u32,
    /// Degrees `d_0, …, d_m`.
    pub d: Vec<u32>,
    /// Coefficients of the ambient Hilbert-Poincaré series `P_M(y)`.
    pub hilbert_m: Vec<u64>,
    pub ln_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SectionCount {
    pub enumerated: u64,
    pub series: u64,
}

/// `C(k + N, N)` for `k < depth`: the Hilbert series of projective `N`-space.
pub fn projective_hilbert(dim: u32, depth: usize) -> Vec<u64> {
    (0..depth as u64).map(|k| (1..=u64::from(dim)).fold(1u64, |acc, i| acc * (k + i) / i)).collect()
}

/// Two quadrics in `P³`: `n = 2`, `m = 1`, `d = (2, 2)`, `(L²) = 4`.
pub fn p3_two_quadrics(depth: usize) -> IntermediateData {
    IntermediateData { n: 2, m: 1, d: vec![2, 2], hilbert_m: projective_hilbert(3, depth), ln_norm: 4.0 }
}

impl IntermediateData {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(FamilyError::InvariantViolation(s));
        if self.m < 1 || self.m + 1 > self.n {
            return bad(format!("need 1 <= m <= n - 1, got n = {}, m = {}", self.n, self.m));
        }
        if self.d.len() != self.m as usize + 1 || self.d.contains(&0) {
            return bad(format!("need m + 1 = {} positive degrees, got {:?}", self.m + 1, self.d));
        }
        if self.hilbert_m.first() != Some(&1) {
            return bad("ambient Hilbert series must start with 1".into());
        }
        if !(self.ln_norm.is_finite() && self.ln_norm > 0.0) {
            return bad("(L^n) must be positive".into());
        }
        Ok(())
    }

    /// `W(p) = (1 + Σ d_i p_i)^{n−m}`, clamped at zero outside `B`.
    pub fn weight(&self, p: &[f64]) -> f64 {
        let s = 1.0 + self.d.iter().zip(p).map(|(&d, &x)| f64::from(d) * x).sum::<f64>();
        s.max(0.0).powi((self.n - self.m) as i32)
    }

    /// Coefficients of `Π (1 − y^{d_i}) P_M(y)`, the dimensions `dim V_k`.
    pub fn fiber_dims(&self) -> Vec<i64> {
        let mut c: Vec<i64> = self.hilbert_m.iter().map(|&x| x as i64).collect();
        for &d in &self.d {
            let d = d as usize;
            for k in (d..c.len()).rev() {
                c[k] -= c[k - d];
            }
        }
        c
    }

    /// Exponent tuples `l_i ≥ 0` with `Σ d_i l_i ≤ l` and `min l_i = 0`, lexicographic.
    pub fn exponent_tuples(&self, l: u32) -> Vec<Vec<u32>> {
        fn rec(d: &[u32], budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == d.len() {
                if cur.contains(&0) {
                    out.push(cur.clone());
                }
                return;
            }
            let di = d[cur.len()];
            for li in 0..=budget / di {
                cur.push(li);
                rec(d, budget - li * di, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(&self.d, l, &mut Vec::new(), &mut out);
        out
    }

    fn degree(&self, tuple: &[u32]) -> u32 {
        self.d.iter().zip(tuple).map(|(a, b)| a * b).sum()
    }

    fn check_depth(&self, l: u32) -> Result<()> {
        if l as usize >= self.hilbert_m.len() {
            return Err(FamilyError::SeriesDepthExceeded { level: l, depth: self.hilbert_m.len() });
        }
        Ok(())
    }
}

/// Sections at level `l`, counted by enumerating exponent tuples and read off the coefficient of
/// `y^l` in `(1 − y^{Σ d_i}) P_M(y)`.
pub fn section_count(data: &IntermediateData, l: u32) -> Result<SectionCount> {
    data.validate()?;
    data.check_depth(l)?;
    let dims = data.fiber_dims();
    let enumerated: i64 = data.exponent_tuples(l).iter().map(|t| dims[(l - data.degree(t)) as usize]).sum();
    let total: usize = data.d.iter().map(|&d| d as usize).sum();
    let h = &data.hilbert_m;
    let l = l as usize;
    let series = h[l] as i64 - if l >= total { h[l - total] as i64 } else { 0 };
    if enumerated < 0 || series < 0 {
        return Err(FamilyError::InvariantViolation("negative section count; check the Hilbert series".into()));
    }
    Ok(SectionCount { enumerated: enumerated as u64, series: series as u64 })
}

/// The standard simplex `{x ≥ 0, Σ x_i = 1}` in `R^{m+1}`.
pub fn skeleton_complex(data: &IntermediateData) -> Result<IntegralPolyhedralComplex> {
    let face = Face::simplex(&vec![1; data.m as usize + 1])?;
    Ok(IntegralPolyhedralComplex::new(vec![face], Vec::new())?)
}

/// `B = ∪_k Δ_k^∨` with `Δ_k^∨ = {p ≤ 0, p_k = 0, Σ d_i p_i ≥ −1}`.
pub fn base_complex(data: &IntermediateData) -> Result<IntegralPolyhedralComplex> {
    let dim = data.m as usize + 1;
    let mut cells = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut verts = vec![vec![Q::zero(); dim]];
        for i in (0..dim).filter(|&i| i != k) {
            let mut v = vec![Q::zero(); dim];
            v[i] = Q::new(-1, i64::from(data.d[i]));
            verts.push(v);
        }
        cells.push(Face::new(verts, None, 1.0)?);
    }
    Ok(IntegralPolyhedralComplex::new(cells, Vec::new())?)
}

/// Pairing problem from the simplex to `B`, with `ν₀` rescaled so that `∫ W dν₀ = 1`.
///
/// The target level must resolve the vertices `−e_i / d_i`.
pub fn intermediate_family(data: &IntermediateData, disc: &Discretization) -> Result<TransportProblem> {
    data.validate()?;
    let source = Arc::new(skeleton_complex(data)?);
    let target = Arc::new(base_complex(data)?);
    let mu0 = quadrature(&source, disc.source_h(), &MeasureWeights::default())?.normalized()?;
    let raw = quadrature(&target, disc.target_h(), &MeasureWeights::default())?;
    let weight: Vec<f64> = raw.coords_f64().iter().map(|p| data.weight(p)).collect();
    let mass = pairwise_sum(&raw.weights.iter().zip(&weight).map(|(a, b)| a * b).collect::<Vec<_>>());
    if mass <= 0.0 {
        return Err(FamilyError::InvariantViolation("weighted target has zero mass".into()));
    }
    let scaled = raw.weights.iter().map(|w| w / mass).collect();
    let nu0 = DiscreteMeasure::new(raw.points, raw.faces, scaled)?;
    let cost = pairing_cost(source, target)?;
    Ok(TransportProblem::new(cost, Arc::new(mu0), Arc::new(nu0), Some(weight), data.ln_norm)?)
}

/// Sections `F_0^{l_0} ⋯ F_m^{l_m}` labeled by `p = −(l_0, …, l_m)/l`, one per point of `B(l⁻¹Z)`,
/// carrying multiplicity `dim V_{l − Σ d_i l_i}`. Then `−l⁻¹ val_x = ⟨x, p⟩` at every level.
pub fn intermediate_theta_family(data: &IntermediateData, levels: &[u32]) -> Result<ThetaFamily> {
    data.validate()?;
    let dims = data.fiber_dims();
    let mut by_level = BTreeMap::new();
    let mut mults = BTreeMap::new();
    for &l in levels {
        if l == 0 {
            return Err(FamilyError::InvariantViolation("levels must be positive".into()));
        }
        data.check_depth(l)?;
        let mut secs = Vec::new();
        let mut ms = Vec::new();
        for t in data.exponent_tuples(l) {
            let label: Vec<Q> = t.iter().map(|&li| Q::new(-i64::from(li), i64::from(l))).collect();
            let exponent: Vec<i64> = t.iter().map(|&li| i64::from(li)).collect();
            secs.push(TropicalSection::new(vec![MonomialTerm::new(exponent, 0, 0)], l, Label::Point(label))?);
            ms.push(dims[(l - data.degree(&t)) as usize].max(0) as u64);
        }
        by_level.insert(l, secs);
        mults.insert(l, ms);
    }
    let coeffs = BTreeMap::from([(0, vec![qi(1)])]);
    Ok(ThetaFamily::new(data.m as usize + 1, by_level, coeffs)?.with_multiplicities(mults)?)
}
