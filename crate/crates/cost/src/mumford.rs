//! Product-type Mumford data, the closed-form abelian theta cost and the theta sections it comes from.
//!
//! A rank-1 factor is a convex piecewise linear `Φ: R → R` with integral breakpoints and slopes
//! satisfying `Φ(m + g) = Φ(m) + C + a·m`, where `g` is the period of the target circle and `a`
//! the period of the source circle. Higher rank data are products of such factors.

use std::collections::BTreeMap;
use std::sync::Arc;

use nacy_polyhedral::{grid_torus_complex, qi, IntegralPolyhedralComplex, Q};
use nacy_tropical::{Label, MonomialTerm, TropicalSection};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{CostError, Result};
use crate::function::{CostFunction, CostKernel, Provenance};
use crate::theta::ThetaFamily;

/// Initial half-width of the search window over `Γ`.
pub const INITIAL_RADIUS: i64 = 4;
/// Largest half-width tried before giving up.
pub const MAX_RADIUS: i64 = 1 << 24;

/// One rank-1 factor `Φ` with its periodicity data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPl {
    /// Generator `g` of `Γ = gZ`.
    pub period: i64,
    /// Breakpoints in `[0, g)`, starting at 0.
    pub breakpoints: Vec<i64>,
    /// Slope on `[b_i, b_{i+1}]`, the last one on `[b_last, g]`.
    pub slopes: Vec<i64>,
    /// `a = dα_g`, the amount the slope grows per period.
    pub shift: i64,
    /// `Φ(0)`.
    #[serde(default)]
    pub base: i64,
}

impl PeriodicPl {
    pub fn new(period: i64, breakpoints: Vec<i64>, slopes: Vec<i64>, shift: i64, base: i64) -> Result<Self> {
        let f = Self { period, breakpoints, slopes, shift, base };
        f.validate()?;
        Ok(f)
    }

    /// `Φ(k) = k(k+1)/2` on integers: period 1, slope `k+1` on `[k, k+1]`.
    pub fn triangular() -> Self {
        Self { period: 1, breakpoints: vec![0], slopes: vec![1], shift: 1, base: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CostError::InvalidData(m.into()));
        if self.period <= 0 {
            return bad("period must be positive");
        }
        if self.breakpoints.first() != Some(&0) {
            return bad("breakpoints must start at 0");
        }
        if self.breakpoints.len() != self.slopes.len() {
            return bad("one slope per breakpoint is required");
        }
        if !self.breakpoints.windows(2).all(|w| w[0] < w[1]) || *self.breakpoints.last().unwrap() >= self.period {
            return bad("breakpoints must increase strictly inside [0, period)");
        }
        if !self.slopes.windows(2).all(|w| w[0] < w[1]) {
            return bad("slopes must increase strictly");
        }
        if self.shift <= 0 {
            return bad("shift must be positive");
        }
        if self.slopes[0] + self.shift <= *self.slopes.last().unwrap() {
            return bad("slope after one period must exceed the last slope");
        }
        Ok(())
    }

    /// `C = Φ(g) − Φ(0)`.
    pub fn increment(&self) -> i64 {
        let mut ends = self.breakpoints[1..].to_vec();
        ends.push(self.period);
        self.slopes.iter().zip(self.breakpoints.iter().zip(&ends)).map(|(s, (b, e))| s * (e - b)).sum()
    }

    /// The affine map `α_g(m) = C + a·m` with `Φ(m + g) = Φ(m) + α_g(m)`.
    pub fn alpha(&self, m: Q) -> Q {
        qi(self.increment()) + qi(self.shift) * m
    }

    /// Linearity domains of `Φ` inside one period.
    pub fn domains(&self) -> Vec<(i64, i64)> {
        let mut ends = self.breakpoints[1..].to_vec();
        ends.push(self.period);
        self.breakpoints.iter().copied().zip(ends).collect()
    }

    fn on_period_q(&self, r: Q) -> Q {
        let mut v = qi(self.base);
        for ((b, e), s) in self.domains().into_iter().zip(&self.slopes) {
            let (b, e) = (qi(b), qi(e));
            if r <= b {
                break;
            }
            v += qi(*s) * (r.min(e) - b);
        }
        v
    }

    fn on_period_f64(&self, r: f64) -> f64 {
        let mut v = self.base as f64;
        for ((b, e), s) in self.domains().into_iter().zip(&self.slopes) {
            let (b, e) = (b as f64, e as f64);
            if r <= b {
                break;
            }
            v += *s as f64 * (r.min(e) - b);
        }
        v
    }

    pub fn value_q(&self, m: Q) -> Q {
        let g = qi(self.period);
        let j = (m / g).floor();
        let r = m - j * g;
        self.on_period_q(r) + j * qi(self.increment()) + qi(self.shift) * (j * r + g * j * (j - qi(1)) / qi(2))
    }

    pub fn value_f64(&self, m: f64) -> f64 {
        let g = self.period as f64;
        let j = (m / g).floor();
        let r = m - j * g;
        self.on_period_f64(r) + j * self.increment() as f64 + self.shift as f64 * (j * r + g * j * (j - 1.0) / 2.0)
    }

    /// `x·m_j + Φ(m_j)` with `m_j = p + j·g`.
    fn term(&self, x: f64, p: f64, j: i64) -> f64 {
        let m = p + (j * self.period) as f64;
        x * m + self.value_f64(m)
    }

    /// Index near the minimizer of `j ↦ x·m_j + Φ(m_j)`, where `α_g(m_j) + x·g` changes sign.
    fn centre(&self, x: f64, p: f64) -> i64 {
        let g = self.period as f64;
        let m_star = -(x * g + self.increment() as f64) / self.shift as f64;
        ((m_star - p) / g).round() as i64
    }

    /// `min_j (x·m_j + Φ(m_j))` over `m_j ∈ p + gZ`, searched in windows that grow until the
    /// minimizer is interior; the objective is convex in `j`, so an interior minimizer is global.
    /// Returns the value and the minimizing `m_j`.
    pub fn min_over_lattice(&self, x: f64, p: f64, radius: i64) -> Result<(f64, f64)> {
        let fail = || CostError::WindowNotConverged { x: vec![x], p: vec![p] };
        if !x.is_finite() || !p.is_finite() {
            return Err(fail());
        }
        let mut centre = self.centre(x, p);
        let mut r = radius.max(1);
        while r <= MAX_RADIUS {
            let (mut best, mut arg) = (f64::INFINITY, centre - r);
            for j in centre - r..=centre + r {
                let v = self.term(x, p, j);
                if v < best {
                    best = v;
                    arg = j;
                }
            }
            if arg != centre - r && arg != centre + r {
                return Ok((best, p + (arg * self.period) as f64));
            }
            centre = arg;
            r *= 2;
        }
        Err(fail())
    }

    /// `j`-range whose terms contain every minimizer of `x·m_j + Φ(m_j)` for `x ∈ [0, a]`, with one
    /// period of margin on either side.
    pub fn certified_window(&self, p: Q) -> (i64, i64) {
        let g = qi(self.period);
        let centre = -qi(self.increment()) / qi(self.shift);
        let lo = ((centre - qi(2) * g - p) / g).floor().to_integer();
        let hi = ((centre + qi(2) * g - p) / g).ceil().to_integer();
        (lo, hi)
    }
}

/// Product-type Mumford data `Φ(m) = Σ Φ_i(m_i)` with `Γ = Π g_i Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MumfordData {
    pub factors: Vec<PeriodicPl>,
}

impl MumfordData {
    pub fn new(factors: Vec<PeriodicPl>) -> Result<Self> {
        if factors.is_empty() {
            return Err(CostError::InvalidData("Mumford data needs at least one factor".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        Ok(Self { factors })
    }

    /// `Φ(k) = k(k+1)/2` in each of `rank` coordinates.
    pub fn triangular(rank: usize) -> Self {
        Self { factors: vec![PeriodicPl::triangular(); rank] }
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Periods `g_i` of the target torus `M_R / Γ`.
    pub fn target_periods(&self) -> Vec<i64> {
        self.factors.iter().map(|f| f.period).collect()
    }

    /// Periods `a_i` of the source torus.
    pub fn source_periods(&self) -> Vec<i64> {
        self.factors.iter().map(|f| f.shift).collect()
    }

    /// `(Lⁿ) = n! · Π g_i`.
    pub fn ln_norm(&self) -> f64 {
        let fact: f64 = (1..=self.rank()).map(|k| k as f64).product();
        fact * self.factors.iter().map(|f| f.period as f64).product::<f64>()
    }

    pub fn value_q(&self, m: &[Q]) -> Q {
        self.factors.iter().zip(m).map(|(f, &x)| f.value_q(x)).sum()
    }

    /// Source torus, one cell per period.
    pub fn source_complex(&self) -> Result<IntegralPolyhedralComplex> {
        let breaks = vec![vec![0]; self.rank()];
        Ok(grid_torus_complex(&breaks, &self.source_periods())?)
    }

    /// Target torus subdivided along the linearity domains of `Φ`.
    pub fn target_complex(&self) -> Result<IntegralPolyhedralComplex> {
        let breaks: Vec<Vec<i64>> = self.factors.iter().map(|f| f.breakpoints.clone()).collect();
        Ok(grid_torus_complex(&breaks, &self.target_periods())?)
    }

    fn check_dims(&self, x: &[f64], p: &[f64]) -> Result<()> {
        if x.len() != self.rank() || p.len() != self.rank() {
            return Err(CostError::DimensionMismatch { source_dim: x.len(), target_dim: p.len() });
        }
        Ok(())
    }
}

/// `−min_γ (⟨x, p+γ⟩ + Φ(p+γ))`, the level-one theta valuation with its sign flipped.
pub fn abelian_raw(data: &MumfordData, x: &[f64], p: &[f64], radius: i64) -> Result<f64> {
    data.check_dims(x, p)?;
    let mut total = 0.0;
    for (i, f) in data.factors.iter().enumerate() {
        let (v, _) = f.min_over_lattice(x[i], p[i], radius).map_err(|_| not_converged(x, p))?;
        total -= v;
    }
    Ok(total)
}

fn not_converged(x: &[f64], p: &[f64]) -> CostError {
    CostError::WindowNotConverged { x: x.to_vec(), p: p.to_vec() }
}

/// The abelian theta cost, normalized against `θ_0`: `c(x, p) = raw(x, p) − raw(x, 0)`.
///
/// The normalization makes `c` periodic in `x` under the source lattice as well as in `p` under `Γ`.
pub fn abelian_theta_cost(data: &MumfordData, x: &[f64], p: &[f64]) -> Result<f64> {
    abelian_theta_cost_with_radius(data, x, p, INITIAL_RADIUS)
}

/// [`abelian_theta_cost`] with an explicit initial window half-width.
pub fn abelian_theta_cost_with_radius(data: &MumfordData, x: &[f64], p: &[f64], radius: i64) -> Result<f64> {
    let zero = vec![0.0; p.len()];
    Ok(abelian_raw(data, x, p, radius)? - abelian_raw(data, x, &zero, radius)?)
}

/// Minimizing lattice points `m*(x, p)` per factor, used for slopes: `∂_x c = m*(x, 0) − m*(x, p)`.
pub fn abelian_minimizers(data: &MumfordData, x: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    data.check_dims(x, p)?;
    data.factors
        .iter()
        .enumerate()
        .map(|(i, f)| f.min_over_lattice(x[i], p[i], INITIAL_RADIUS).map(|(_, m)| m).map_err(|_| not_converged(x, p)))
        .collect()
}

/// Evaluator for [`abelian_theta_cost`]; returns NaN if the window search fails.
#[derive(Debug, Clone)]
pub struct AbelianKernel {
    pub data: MumfordData,
}

impl CostKernel for AbelianKernel {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        abelian_theta_cost(&self.data, x, p).unwrap_or(f64::NAN)
    }

    fn name(&self) -> &'static str {
        "abelian"
    }
}

/// Abelian cost on source torus × target torus.
///
/// Both window minimizers lie in an interval of length `g_i`, so each factor has slope at most `g_i`.
pub fn abelian_cost(data: &MumfordData) -> Result<CostFunction> {
    Ok(CostFunction {
        source: Arc::new(data.source_complex()?),
        target: Arc::new(data.target_complex()?),
        kernel: Arc::new(AbelianKernel { data: data.clone() }),
        lipschitz_x: data.factors.iter().map(|f| (f.period * f.period) as f64).sum::<f64>().sqrt(),
        provenance: Provenance::Abelian { rank: data.rank() },
    })
}

/// Labels `p ∈ (l⁻¹Z)ⁿ ∩ Π [0, g_i)` in lexicographic order.
pub fn theta_labels(data: &MumfordData, level: u32) -> Vec<Vec<Q>> {
    let l = i64::from(level);
    let mut out: Vec<Vec<Q>> = vec![Vec::new()];
    for f in &data.factors {
        let steps: Vec<Q> = (0..f.period * l).map(|k| Q::new(k, l)).collect();
        out = out.into_iter().flat_map(|pre| steps.iter().map(move |s| [pre.clone(), vec![*s]].concat())).collect();
    }
    out
}

/// Theta section `ϑ_p^l`, truncated to the product of certified windows.
pub fn theta_section(data: &MumfordData, level: u32, p: &[Q]) -> Result<TropicalSection> {
    let l = qi(i64::from(level));
    let mut terms: Vec<(Vec<i64>, Q)> = vec![(Vec::new(), Q::zero())];
    for (f, &pi) in data.factors.iter().zip(p) {
        let (lo, hi) = f.certified_window(pi);
        let mut next = Vec::with_capacity(terms.len() * (hi - lo + 1) as usize);
        for (e, t) in &terms {
            for j in lo..=hi {
                let m = pi + qi(j * f.period);
                let em = l * m;
                if !em.is_integer() {
                    return Err(CostError::InvalidLabel(format!("{p:?}"), level));
                }
                let mut e2 = e.clone();
                e2.push(em.to_integer());
                next.push((e2, *t + l * f.value_q(m)));
            }
        }
        terms = next;
    }
    let terms = terms
        .into_iter()
        .map(|(e, t)| {
            debug_assert!(t.is_integer());
            MonomialTerm::new(e, t.to_integer(), 0)
        })
        .collect();
    Ok(TropicalSection::new(terms, level, Label::Point(p.to_vec()))?)
}

/// The theta basis at the given levels, with `θ_0` as reference and unit coefficients.
pub fn mumford_theta_family(data: &MumfordData, levels: &[u32]) -> Result<ThetaFamily> {
    let mut by_level = BTreeMap::new();
    for &l in levels {
        if l == 0 {
            return Err(CostError::InvalidData("levels must be positive".into()));
        }
        let secs = theta_labels(data, l).iter().map(|p| theta_section(data, l, p)).collect::<Result<Vec<_>>>()?;
        by_level.insert(l, secs);
    }
    let coeffs = BTreeMap::from([(0, vec![qi(1)])]);
    let periods = data.target_periods().into_iter().map(qi).collect();
    Ok(ThetaFamily::new(data.rank(), by_level, coeffs)?
        .with_periods(periods)?
        .with_reference(vec![Q::zero(); data.rank()])?)
}
