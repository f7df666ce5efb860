//! Sampled checks of the semigroup inequality and of `−l⁻¹ val ≥ c` for a theta family.

use nacy_polyhedral::{fmt_q, q_to_f64, qi, Q};
use serde::Serialize;

use crate::error::Result;
use crate::function::CostFunction;
use crate::theta::ThetaFamily;

/// One sampled triple `(x, p, l)`, optionally with a partner `(p′, l′)` for the subadditivity check.
#[derive(Clone, Debug, PartialEq)]
pub struct CostSample {
    pub x: Vec<f64>,
    pub p: Vec<Q>,
    pub level: u32,
    pub partner: Option<(Vec<Q>, u32)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Subadditivity,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundViolation {
    pub kind: BoundKind,
    pub sample: usize,
    pub x: Vec<f64>,
    pub p: Vec<String>,
    pub level: u32,
    /// Left and right side of the violated inequality `lhs ≤ rhs`.
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub lower_bound_checks: usize,
    pub subadditivity_checks: usize,
    /// Pairs skipped because `p` and `p′` share no target cell.
    pub skipped_pairs: usize,
    pub violations: Vec<BoundViolation>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every sample.
///
/// (a) `val_x(θ_p^l) + val_x(θ_{p′}^{l′}) ≤ val_x(θ_r^{l+l′})`, `r = (lp + l′p′)/(l + l′)`, on
/// unnormalized valuations, whenever `p` and `p′` lie in a common target cell;
/// (b) `c(x, p) − tol ≤ −l⁻¹ val_x(θ_p^l)` with the family's normalized valuation.
///
/// Labels that are not in the family are errors; inequality failures are reported.
pub fn verify_cost_bounds(
    family: &ThetaFamily,
    cost: &CostFunction,
    samples: &[CostSample],
    tol: f64,
) -> Result<BoundReport> {
    let mut report = BoundReport::default();
    for (k, s) in samples.iter().enumerate() {
        let l = s.level;
        let i = family.label_index(l, &s.p)?;
        let pf: Vec<f64> = s.p.iter().map(q_to_f64).collect();
        let bound = -family.val(l, i, &s.x)? / f64::from(l);
        let c = cost.eval(&s.x, &pf);
        report.lower_bound_checks += 1;
        if !(c - tol <= bound) {
            report.violations.push(BoundViolation {
                kind: BoundKind::LowerBound,
                sample: k,
                x: s.x.clone(),
                p: s.p.iter().map(fmt_q).collect(),
                level: l,
                lhs: c,
                rhs: bound,
            });
        }
        let Some((p2, l2)) = &s.partner else { continue };
        if !cost.target.share_cell(&s.p, p2) {
            report.skipped_pairs += 1;
            continue;
        }
        let j = family.label_index(*l2, p2)?;
        let total = l + l2;
        let r: Vec<Q> = s
            .p
            .iter()
            .zip(p2)
            .map(|(a, b)| (qi(i64::from(l)) * a + qi(i64::from(*l2)) * b) / qi(i64::from(total)))
            .collect();
        let r = cost.target.canonical(&r);
        let m = family.label_index(total, &r)?;
        let lhs = family.val_raw(l, i, &s.x)? + family.val_raw(*l2, j, &s.x)?;
        let rhs = family.val_raw(total, m, &s.x)?;
        report.subadditivity_checks += 1;
        if !(lhs <= rhs + tol) {
            report.violations.push(BoundViolation {
                kind: BoundKind::Subadditivity,
                sample: k,
                x: s.x.clone(),
                p: s.p.iter().map(fmt_q).collect(),
                level: l,
                lhs,
                rhs,
            });
        }
    }
    Ok(report)
}
