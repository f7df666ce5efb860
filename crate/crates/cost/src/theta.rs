//! Families of theta sections indexed by rational points of the target, and Fekete estimates of the cost.

use std::collections::BTreeMap;
use std::sync::Arc;

use nacy_polyhedral::{fmt_q, parse_q, q_to_f64, IntegralPolyhedralComplex, Q};
use nacy_tropical::{lipschitz_bound, Label, TropicalSection};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{CostError, Result};
use crate::function::{CostFunction, CostKernel, Provenance};

/// Sections `θ_p^l` per level, each labeled by a point `p ∈ B(l⁻¹Z)`.
#[derive(Clone, Debug)]
pub struct ThetaFamily {
    dim: usize,
    levels: BTreeMap<u32, Vec<TropicalSection>>,
    multiplicities: BTreeMap<u32, Vec<u64>>,
    reference: Option<Vec<Q>>,
    periods: Option<Vec<Q>>,
    coeffs: BTreeMap<usize, Vec<Q>>,
    index: BTreeMap<u32, BTreeMap<Vec<Q>, usize>>,
}

fn label_point(s: &TropicalSection) -> Option<&[Q]> {
    match &s.label {
        Label::Point(p) => Some(p),
        Label::Tag(_) => None,
    }
}

fn show(p: &[Q]) -> String {
    format!("({})", p.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

impl ThetaFamily {
    /// Validates that every section carries a point label of length `dim`, unique within its level,
    /// and that sections sit under their own level.
    pub fn new(
        dim: usize,
        levels: BTreeMap<u32, Vec<TropicalSection>>,
        coeffs: BTreeMap<usize, Vec<Q>>,
    ) -> Result<Self> {
        let mut family = Self {
            dim,
            levels,
            multiplicities: BTreeMap::new(),
            reference: None,
            periods: None,
            coeffs,
            index: BTreeMap::new(),
        };
        family.reindex()?;
        Ok(family)
    }

    fn reindex(&mut self) -> Result<()> {
        let mut index = BTreeMap::new();
        for (&l, secs) in &self.levels {
            let mut map = BTreeMap::new();
            for (i, s) in secs.iter().enumerate() {
                if s.level != l {
                    return Err(CostError::InvalidData(format!("section {i} of level {l} has level {}", s.level)));
                }
                let p = label_point(s).ok_or_else(|| CostError::InvalidLabel(format!("{:?}", s.label), l))?;
                if p.len() != self.dim {
                    return Err(CostError::InvalidLabel(show(p), l));
                }
                if map.insert(self.canonical_label(p), i).is_some() {
                    return Err(CostError::InvalidData(format!("label {} repeats at level {l}", show(p))));
                }
            }
            index.insert(l, map);
        }
        self.index = index;
        Ok(())
    }

    /// Labels are read modulo these periods, coordinatewise.
    pub fn with_periods(mut self, periods: Vec<Q>) -> Result<Self> {
        if periods.len() != self.dim || periods.iter().any(|g| *g <= Q::zero()) {
            return Err(CostError::InvalidData("periods must be positive, one per label coordinate".into()));
        }
        self.periods = Some(periods);
        self.reindex()?;
        Ok(self)
    }

    /// Valuations are reported relative to the section with this label at the same level.
    pub fn with_reference(mut self, reference: Vec<Q>) -> Result<Self> {
        if reference.len() != self.dim {
            return Err(CostError::InvalidLabel(show(&reference), 0));
        }
        self.reference = Some(self.canonical_label(&reference));
        Ok(self)
    }

    pub fn with_multiplicities(mut self, multiplicities: BTreeMap<u32, Vec<u64>>) -> Result<Self> {
        for (l, m) in &multiplicities {
            if self.sections(*l)?.len() != m.len() {
                return Err(CostError::InvalidData(format!("multiplicity count mismatch at level {l}")));
            }
        }
        self.multiplicities = multiplicities;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> Vec<u32> {
        self.levels.keys().copied().collect()
    }

    pub fn levels_map(&self) -> &BTreeMap<u32, Vec<TropicalSection>> {
        &self.levels
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Vec<Q>> {
        &self.coeffs
    }

    pub fn periods(&self) -> Option<&[Q]> {
        self.periods.as_deref()
    }

    pub fn reference(&self) -> Option<&[Q]> {
        self.reference.as_deref()
    }

    pub fn sections(&self, level: u32) -> Result<&[TropicalSection]> {
        self.levels.get(&level).map(Vec::as_slice).ok_or(CostError::MissingLevel(level))
    }

    /// Per-section multiplicities at a level; 1 unless set.
    pub fn multiplicities(&self, level: u32) -> Result<Vec<u64>> {
        let n = self.sections(level)?.len();
        Ok(self.multiplicities.get(&level).cloned().unwrap_or_else(|| vec![1; n]))
    }

    pub fn label(&self, level: u32, i: usize) -> Result<&[Q]> {
        let s = self.sections(level)?.get(i).ok_or_else(|| CostError::InvalidLabel(format!("#{i}"), level))?;
        Ok(label_point(s).expect("labels are validated"))
    }

    /// Representative of `p` with each periodic coordinate in `[0, g)`.
    pub fn canonical_label(&self, p: &[Q]) -> Vec<Q> {
        match &self.periods {
            None => p.to_vec(),
            Some(gs) => p.iter().zip(gs).map(|(&x, &g)| x - (x / g).floor() * g).collect(),
        }
    }

    pub fn label_index(&self, level: u32, p: &[Q]) -> Result<usize> {
        let map = self.index.get(&level).ok_or(CostError::MissingLevel(level))?;
        map.get(&self.canonical_label(p)).copied().ok_or_else(|| CostError::InvalidLabel(show(p), level))
    }

    /// `val_x(θ_i^l)` without normalization.
    pub fn val_raw(&self, level: u32, i: usize, x: &[f64]) -> Result<f64> {
        let s = self.sections(level)?.get(i).ok_or_else(|| CostError::InvalidLabel(format!("#{i}"), level))?;
        Ok(s.val_raw(x))
    }

    fn reference_val(&self, level: u32, x: &[f64]) -> Result<f64> {
        match &self.reference {
            None => Ok(0.0),
            Some(r) => {
                let i = self.label_index(level, r)?;
                self.val_raw(level, i, x)
            }
        }
    }

    /// `val_x(θ_i^l)` minus the reference section's valuation at the same level.
    pub fn val(&self, level: u32, i: usize, x: &[f64]) -> Result<f64> {
        Ok(self.val_raw(level, i, x)? - self.reference_val(level, x)?)
    }

    /// Exact relative valuation at a rational point.
    pub fn val_q(&self, level: u32, i: usize, x: &[Q]) -> Result<Q> {
        let secs = self.sections(level)?;
        let s = secs.get(i).ok_or_else(|| CostError::InvalidLabel(format!("#{i}"), level))?;
        let r = match &self.reference {
            None => Q::zero(),
            Some(r) => secs[self.label_index(level, r)?].val_q(x),
        };
        Ok(s.val_q(x) - r)
    }

    /// Label at `level` closest to `p`, with periodic distance when periods are set.
    /// Equal distances go to the lexicographically smallest label.
    pub fn nearest_label(&self, level: u32, p: &[f64]) -> Result<usize> {
        let secs = self.sections(level)?;
        if p.len() != self.dim {
            return Err(CostError::DimensionMismatch { source_dim: self.dim, target_dim: p.len() });
        }
        let dist = |q: &[Q]| -> f64 {
            q.iter()
                .enumerate()
                .map(|(k, c)| {
                    let mut d = (q_to_f64(c) - p[k]).abs();
                    if let Some(gs) = &self.periods {
                        let g = q_to_f64(&gs[k]);
                        d %= g;
                        d = d.min(g - d);
                    }
                    d * d
                })
                .sum()
        };
        let mut best: Option<(f64, &[Q], usize)> = None;
        for (i, s) in secs.iter().enumerate() {
            let q = label_point(s).expect("labels are validated");
            let d = dist(q);
            let better = match best {
                None => true,
                Some((bd, bq, _)) => d < bd || (d == bd && q < bq),
            };
            if better {
                best = Some((d, q, i));
            }
        }
        best.map(|(_, _, i)| i).ok_or(CostError::MissingLevel(level))
    }

    pub fn to_spec(&self) -> ThetaFamilySpec {
        let fmt = |v: &[Q]| v.iter().map(fmt_q).collect::<Vec<_>>();
        ThetaFamilySpec {
            dim: self.dim,
            periods: self.periods.as_deref().map(fmt),
            reference: self.reference.as_deref().map(fmt),
            levels: self.levels.clone(),
            multiplicities: self.multiplicities.clone(),
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, fmt(v))).collect(),
        }
    }
}

/// File form of a [`ThetaFamily`]; rationals are `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaFamilySpec {
    pub dim: usize,
    #[serde(default)]
    pub periods: Option<Vec<String>>,
    #[serde(default)]
    pub reference: Option<Vec<String>>,
    pub levels: BTreeMap<u32, Vec<TropicalSection>>,
    #[serde(default)]
    pub multiplicities: BTreeMap<u32, Vec<u64>>,
    #[serde(default)]
    pub coeffs: BTreeMap<usize, Vec<String>>,
}

impl ThetaFamilySpec {
    pub fn build(&self) -> Result<ThetaFamily> {
        let parse = |v: &[String]| -> Result<Vec<Q>> {
            v.iter().map(|x| parse_q(x).map_err(CostError::from)).collect()
        };
        let coeffs = self.coeffs.iter().map(|(k, v)| Ok((*k, parse(v)?))).collect::<Result<BTreeMap<_, _>>>()?;
        let mut f = ThetaFamily::new(self.dim, self.levels.clone(), coeffs)?;
        if let Some(p) = &self.periods {
            f = f.with_periods(parse(p)?)?;
        }
        if let Some(r) = &self.reference {
            f = f.with_reference(parse(r)?)?;
        }
        f.with_multiplicities(self.multiplicities.clone())
    }
}

/// Per-level values `−l⁻¹ val_x(θ_{p_l}^l)` along a level schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeketeEstimate {
    pub levels: Vec<u32>,
    /// The label `p_l` substituted for `p` at each level.
    pub labels: Vec<Vec<String>>,
    pub per_level: Vec<f64>,
    /// Value at the last scheduled level.
    pub estimate: f64,
    /// Smallest value over the schedule; every entry bounds `c(x, p)` from above.
    pub best_bound: f64,
}

pub fn fekete_cost_estimate(family: &ThetaFamily, x: &[f64], p: &[f64], schedule: &[u32]) -> Result<FeketeEstimate> {
    if schedule.is_empty() || !schedule.windows(2).all(|w| w[0] < w[1]) {
        return Err(CostError::InvalidData("level schedule must be non-empty and increasing".into()));
    }
    let mut labels = Vec::with_capacity(schedule.len());
    let mut per_level = Vec::with_capacity(schedule.len());
    for &l in schedule {
        let i = family.nearest_label(l, p)?;
        labels.push(family.label(l, i)?.iter().map(fmt_q).collect());
        per_level.push(-family.val(l, i, x)? / f64::from(l));
    }
    let estimate = *per_level.last().expect("schedule is non-empty");
    let best_bound = per_level.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FeketeEstimate { levels: schedule.to_vec(), labels, per_level, estimate, best_bound })
}

/// Cost evaluated from one level of a theta family, at the label nearest to `p`.
#[derive(Debug, Clone)]
pub struct FeketeKernel {
    pub family: Arc<ThetaFamily>,
    pub level: u32,
}

impl CostKernel for FeketeKernel {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        let l = self.level;
        self.family
            .nearest_label(l, p)
            .and_then(|i| self.family.val(l, i, x))
            .map_or(f64::NAN, |v| -v / f64::from(l))
    }

    fn name(&self) -> &'static str {
        "fekete"
    }
}

/// Fekete cost at the largest of `levels`; the Lipschitz constant adds the reference section's slope
/// bound to the largest section bound on the first top source cell.
pub fn fekete_cost(
    family: Arc<ThetaFamily>,
    levels: &[u32],
    source: Arc<IntegralPolyhedralComplex>,
    target: Arc<IntegralPolyhedralComplex>,
) -> Result<CostFunction> {
    let &level = levels.iter().max().ok_or_else(|| CostError::InvalidData("no levels given".into()))?;
    let secs = family.sections(level)?;
    let face = &source.cells()[source.top_cells()[0]];
    let section_bound = secs.iter().map(|s| lipschitz_bound(s, face)).fold(0.0, f64::max);
    let reference_bound = match family.reference() {
        Some(r) => lipschitz_bound(&secs[family.label_index(level, r)?], face),
        None => 0.0,
    };
    Ok(CostFunction {
        source,
        target,
        kernel: Arc::new(FeketeKernel { family, level }),
        lipschitz_x: section_bound + reference_bound,
        provenance: Provenance::Fekete { levels: levels.to_vec() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nacy_polyhedral::qi;
    use nacy_tropical::MonomialTerm;

    fn constant_family(vals: &[(u32, i64)]) -> ThetaFamily {
        let mut levels = BTreeMap::new();
        for &(l, v) in vals {
            let s = TropicalSection::new(vec![MonomialTerm::new(vec![0], v, 0)], l, Label::Point(vec![qi(0)])).unwrap();
            levels.insert(l, vec![s]);
        }
        ThetaFamily::new(1, levels, BTreeMap::new()).unwrap()
    }

    #[test]
    fn fekete_of_l_plus_one() {
        // −val = l + 1 at every level.
        let f = constant_family(&[(1, -2), (2, -3), (4, -5), (8, -9)]);
        let e = fekete_cost_estimate(&f, &[0.3], &[0.0], &[1, 2, 4, 8]).unwrap();
        assert_eq!(e.per_level, vec![2.0, 1.5, 1.25, 1.125]);
        assert_eq!(e.estimate, 1.125);
        assert_eq!(e.best_bound, 1.125);
        assert!(matches!(fekete_cost_estimate(&f, &[0.3], &[0.0], &[3]), Err(CostError::MissingLevel(3))));
        assert!(fekete_cost_estimate(&f, &[0.3], &[0.0], &[2, 1]).is_err());
    }

    #[test]
    fn nearest_label_ties_and_periods() {
        let mk = |p: Q| TropicalSection::new(vec![MonomialTerm::new(vec![0], 0, 0)], 2, Label::Point(vec![p])).unwrap();
        let levels = BTreeMap::from([(2, vec![mk(Q::new(1, 2)), mk(qi(0))])]);
        let f = ThetaFamily::new(1, levels, BTreeMap::new()).unwrap().with_periods(vec![qi(1)]).unwrap();
        // 0.25 is equidistant from 0 and 1/2: the smaller label wins.
        assert_eq!(f.nearest_label(2, &[0.25]).unwrap(), 1);
        // 0.9 is closer to 1 ≡ 0 than to 1/2.
        assert_eq!(f.nearest_label(2, &[0.9]).unwrap(), 1);
        assert_eq!(f.label_index(2, &[Q::new(3, 2)]).unwrap(), 0);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mk = |p: i64| TropicalSection::new(vec![MonomialTerm::new(vec![0], 0, 0)], 1, Label::Point(vec![qi(p)])).unwrap();
        let levels = BTreeMap::from([(1, vec![mk(0), mk(1)])]);
        let f = ThetaFamily::new(1, levels, BTreeMap::new()).unwrap();
        assert!(f.with_periods(vec![qi(1)]).is_err());
    }
}
