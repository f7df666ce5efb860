//! Finite-`t` Fubini-Study potentials of abelian theta functions against their NA limit.
//!
//! On the skeleton `|z| = |t|^x` each term of `ϑ_p(z; t) = Σ_γ t^{lΦ(p+γ)} z^{l(p+γ)}` has modulus
//! `exp(−L e_γ(x))` with `L = |log|t||` and `e_γ(x) = l(Φ(p+γ) + ⟨x, p+γ⟩)`. Sums are taken in log
//! space relative to the smallest exponent, and factorize over the factors of product data.

use nacy_cost::mumford::INITIAL_RADIUS;
use nacy_cost::{theta_labels, MumfordData, PeriodicPl};
use nacy_polyhedral::q_to_f64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, Result};

/// Largest admissible tail of the truncated series relative to its leading term.
pub const TAIL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridConfig {
    pub level: u32,
    /// Values `0 < t < 1` with strictly decreasing magnitude.
    pub t_schedule: Vec<f64>,
    /// Half-width of the summation window around the dominant lattice point, per factor.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Constants `c_p` per label (lexicographic order); zero when absent.
    #[serde(default)]
    pub constants: Option<Vec<f64>>,
}

fn default_window() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HybridCurve {
    pub level: u32,
    pub t: Vec<f64>,
    /// Sup-norm error over the skeleton grid for each `t`.
    pub errors: Vec<f64>,
    pub window: usize,
}

/// Finite-`t` and NA potentials at one skeleton point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HybridValue {
    pub finite: f64,
    pub na: f64,
}

/// `(e_min, log Σ_γ exp(−L (e_γ − e_min)))` for one factor, with a certified tail.
fn factor_sum(f: &PeriodicPl, level: u32, p: f64, x: f64, big_l: f64, window: usize, t: f64) -> Result<(f64, f64)> {
    let l = f64::from(level);
    let (_, m_star) = f.min_over_lattice(x, p, INITIAL_RADIUS)?;
    let g = f.period as f64;
    let j_star = ((m_star - p) / g).round() as i64;
    let e = |j: i64| {
        let m = p + (j * f.period) as f64;
        l * (f.value_f64(m) + x * m)
    };
    let w = window.max(1) as i64;
    let e_min = e(j_star);
    let mut terms: Vec<f64> = (j_star - w..=j_star + w).map(|j| -big_l * (e(j) - e_min)).collect();
    terms.sort_by(|a, b| a.total_cmp(b));
    let sum: f64 = terms.iter().map(|v| v.exp()).sum();

    let mut tail = 0.0;
    for (edge, inner) in [(j_star + w, j_star + w - 1), (j_star - w, j_star - w + 1)] {
        let step = e(edge) - e(inner);
        if step <= 0.0 {
            tail = f64::INFINITY;
            break;
        }
        let r = (-big_l * step).exp();
        tail += (-big_l * (e(edge) - e_min)).exp() * r / (1.0 - r);
    }
    if !(tail <= TAIL_TOL) {
        return Err(DiagnosticsError::TruncationInsufficient { t, x: vec![x], tail });
    }
    Ok((e_min, sum.ln()))
}

fn validate(data: &MumfordData, config: &HybridConfig, labels: usize) -> Result<()> {
    if config.level == 0 {
        return Err(DiagnosticsError::InvalidInput("level must be positive".into()));
    }
    if config.t_schedule.is_empty() || config.t_schedule.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(DiagnosticsError::InvalidInput("t values must lie in (0, 1)".into()));
    }
    if config.t_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(DiagnosticsError::InvalidInput("t schedule must be strictly decreasing".into()));
    }
    if let Some(c) = &config.constants {
        if c.len() != labels {
            return Err(DiagnosticsError::InvalidInput(format!("expected {labels} constants, got {}", c.len())));
        }
    }
    if data.rank() == 0 {
        return Err(DiagnosticsError::InvalidInput("empty Mumford data".into()));
    }
    Ok(())
}

/// Finite-`t` potential `max_p (log|ϑ_p| − c_p L) / (l L)` and NA potential `max_p (−val_x ϑ_p − c_p) / l` at `x`.
pub fn hybrid_potential(data: &MumfordData, config: &HybridConfig, t: f64, x: &[f64]) -> Result<HybridValue> {
    let labels: Vec<Vec<f64>> =
        theta_labels(data, config.level).iter().map(|p| p.iter().map(q_to_f64).collect()).collect();
    validate(data, config, labels.len())?;
    potential_at(data, config, &labels, t, x)
}

fn potential_at(data: &MumfordData, config: &HybridConfig, labels: &[Vec<f64>], t: f64, x: &[f64]) -> Result<HybridValue> {
    if x.len() != data.rank() {
        return Err(DiagnosticsError::InvalidInput(format!("point has {} coordinates, rank is {}", x.len(), data.rank())));
    }
    let big_l = -t.ln();
    let l = f64::from(config.level);
    let (mut finite, mut na) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (k, p) in labels.iter().enumerate() {
        let c = config.constants.as_ref().map_or(0.0, |c| c[k]);
        let (mut val, mut log_sum) = (0.0, 0.0);
        for (i, f) in data.factors.iter().enumerate() {
            let (e, s) = factor_sum(f, config.level, p[i], x[i], big_l, config.window, t)?;
            val += e;
            log_sum += s;
        }
        let a = -val - c;
        na = na.max(a / l);
        finite = finite.max((a + log_sum / big_l) / l);
    }
    Ok(HybridValue { finite, na })
}

/// Sup-norm distance between the finite-`t` and NA potentials over `grid`, for each `t`.
pub fn hybrid_potential_curve(data: &MumfordData, config: &HybridConfig, grid: &[Vec<f64>]) -> Result<HybridCurve> {
    let labels: Vec<Vec<f64>> =
        theta_labels(data, config.level).iter().map(|p| p.iter().map(q_to_f64).collect()).collect();
    validate(data, config, labels.len())?;
    if grid.is_empty() {
        return Err(DiagnosticsError::InvalidInput("empty skeleton grid".into()));
    }
    let errors = config
        .t_schedule
        .iter()
        .map(|&t| {
            let per_point: Vec<f64> = grid
                .par_iter()
                .map(|x| potential_at(data, config, &labels, t, x).map(|v| (v.finite - v.na).abs()))
                .collect::<Result<_>>()?;
            Ok(per_point.into_iter().fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(HybridCurve { level: config.level, t: config.t_schedule.clone(), errors, window: config.window })
}
