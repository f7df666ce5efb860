//! Truncated Laurent series in `t` and row reduction of linear systems with series coefficients.

use std::collections::BTreeMap;
use std::fmt;

use nacy_polyhedral::Q;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TropicalError};

/// Default number of known coefficients for series built from polynomial data.
pub const DEFAULT_TRUNCATION: i64 = 16;
/// Minimum remaining depth a row must keep during reduction.
pub const DEFAULT_WORKING_DEPTH: i64 = 8;

/// Laurent series `Σ c_k t^k`, known modulo `t^prec` (or exactly when `prec` is `None`).
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    terms: BTreeMap<i64, BigRational>,
    prec: Option<i64>,
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*t^{k}")?;
        }
        match self.prec {
            Some(p) => write!(f, " + O(t^{p})"),
            None => Ok(()),
        }
    }
}

fn big(q: &Q) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

impl Series {
    pub fn zero_exact() -> Self {
        Self { terms: BTreeMap::new(), prec: None }
    }

    pub fn monomial(k: i64, c: BigRational) -> Self {
        let mut s = Self::zero_exact();
        s.add_term(k, c);
        s
    }

    /// Polynomial `Σ coeffs[i] t^(start+i)` known modulo `t^prec`.
    pub fn poly(start: i64, coeffs: &[Q], prec: Option<i64>) -> Self {
        let mut s = Self { terms: BTreeMap::new(), prec };
        for (i, c) in coeffs.iter().enumerate() {
            s.add_term(start + i as i64, big(c));
        }
        s.truncate();
        s
    }

    /// Integer polynomial with the default truncation.
    pub fn from_ints(start: i64, coeffs: &[i64]) -> Self {
        let q: Vec<Q> = coeffs.iter().map(|&c| Q::from_integer(c)).collect();
        Self::poly(start, &q, Some(DEFAULT_TRUNCATION))
    }

    fn add_term(&mut self, k: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn truncate(&mut self) {
        if let Some(p) = self.prec {
            self.terms.retain(|&k, _| k < p);
        }
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Order of the lowest nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn coeff(&self, k: i64) -> BigRational {
        self.terms.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(), prec: self.prec.map(|p| p + k) }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self { terms: BTreeMap::new(), prec: self.prec };
        }
        Self { terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(), prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = match (self.prec, other.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut out = Self { terms: self.terms.clone(), prec };
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out.truncate();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let lead = |s: &Self| s.valuation().or(s.prec).unwrap_or(0);
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (Some(p), None) => Some(p + lead(other)),
            (None, Some(q)) => Some(q + lead(self)),
            (Some(p), Some(q)) => Some((p + lead(other)).min(q + lead(self))),
        };
        let mut out = Self { terms: BTreeMap::new(), prec };
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a + b, x * y);
            }
        }
        out.truncate();
        out
    }

    /// Equality of all coefficients known on both sides.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let d = self.sub(other);
        d.is_zero()
    }
}

/// Matrix of truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    pub entries: Vec<Vec<Series>>,
    pub truncation_order: i64,
}

/// Polynomial entry of a series-matrix file: `t^start · Σ coeffs[i] t^i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesEntrySpec {
    #[serde(default)]
    pub start: i64,
    pub coeffs: Vec<String>,
}

impl SeriesMatrix {
    pub fn new(entries: Vec<Vec<Series>>, truncation_order: i64) -> Result<Self> {
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(TropicalError::Invalid("ragged series matrix".into()));
        }
        Ok(Self { entries, truncation_order })
    }

    /// Integer polynomial entries `[[coeffs of t^0, t^1, …]]`, truncated at the default order.
    pub fn from_int_polys(rows: &[Vec<Vec<i64>>]) -> Result<Self> {
        let entries = rows.iter().map(|r| r.iter().map(|c| Series::from_ints(0, c)).collect()).collect();
        Self::new(entries, DEFAULT_TRUNCATION)
    }

    pub fn from_spec(rows: &[Vec<SeriesEntrySpec>], truncation_order: i64) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len());
        for r in rows {
            let mut row = Vec::with_capacity(r.len());
            for e in r {
                let c = e
                    .coeffs
                    .iter()
                    .map(|x| nacy_polyhedral::parse_q(x))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                row.push(Series::poly(e.start, &c, Some(truncation_order)));
            }
            entries.push(row);
        }
        Self::new(entries, truncation_order)
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    /// `self · other` for a left factor of exact or truncated series.
    pub fn mul(&self, other: &SeriesMatrix) -> SeriesMatrix {
        let entries = self
            .entries
            .iter()
            .map(|row| {
                (0..other.cols())
                    .map(|j| {
                        row.iter()
                            .zip(&other.entries)
                            .fold(Series::zero_exact(), |acc, (a, orow)| acc.add(&a.mul(&orow[j])))
                    })
                    .collect()
            })
            .collect();
        SeriesMatrix { entries, truncation_order: self.truncation_order.min(other.truncation_order) }
    }
}

/// Options for [`series_row_reduce`].
#[derive(Clone, Copy, Debug)]
pub struct RowReduceOptions {
    pub working_depth: i64,
}

impl Default for RowReduceOptions {
    fn default() -> Self {
        Self { working_depth: DEFAULT_WORKING_DEPTH }
    }
}

/// Result of row reduction.
#[derive(Clone, Debug)]
pub struct RowReduction {
    /// Exact Laurent row operations with `row_ops · M = reduced`, rows in original order.
    pub row_ops: SeriesMatrix,
    /// Reduced rows in original order; eliminated rows are zero.
    pub reduced: SeriesMatrix,
    /// Change of variables `x' = B x`; the first `rank` rows are the pivot rows.
    pub transform: SeriesMatrix,
    /// Number of independent pivot rows.
    pub rank: usize,
    /// Original indices of pivot rows, by decreasing shifted exponent.
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    /// Shifted exponents of the pivot rows, aligned with `pivot_rows`.
    pub mu_prime: Vec<f64>,
    pub eliminated: Vec<usize>,
}

struct Row {
    orig: usize,
    entries: Vec<Series>,
    ops: Vec<Series>,
    mu: f64,
    zero: bool,
}

impl Row {
    fn valuation(&self) -> Option<i64> {
        self.entries.iter().filter_map(Series::valuation).min()
    }

    fn depth(&self) -> i64 {
        self.entries.iter().filter_map(Series::prec).min().unwrap_or(i64::MAX)
    }

    /// Divides by `t^v` so the row has valuation zero; marks zero rows.
    fn normalize(&mut self, working_depth: i64) -> Result<bool> {
        let Some(v) = self.valuation() else {
            self.zero = true;
            return Ok(false);
        };
        if v == 0 {
            return Ok(false);
        }
        self.entries = self.entries.iter().map(|s| s.shift(-v)).collect();
        self.ops = self.ops.iter().map(|s| s.shift(-v)).collect();
        self.mu -= v as f64;
        if self.depth() < working_depth {
            return Err(TropicalError::TruncationExhausted { row: self.orig });
        }
        Ok(true)
    }

    fn constant(&self, c: usize) -> BigRational {
        self.entries[c].coeff(0)
    }

    fn sub_scaled(&mut self, other: &Row, f: &BigRational) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a = a.sub(&b.scale(f));
        }
        for (a, b) in self.ops.iter_mut().zip(&other.ops) {
            *a = a.sub(&b.scale(f));
        }
    }
}

/// Reduces the system `Σ_j M_ij x_j = O(|t|^{μ_i})` to independent leading rows.
pub fn series_row_reduce(system: &SeriesMatrix, mu: &[f64], opts: RowReduceOptions) -> Result<RowReduction> {
    let (ni, nj) = (system.rows(), system.cols());
    if mu.len() != ni {
        return Err(TropicalError::DimensionMismatch { expected: ni, got: mu.len() });
    }
    let mut rows: Vec<Row> = (0..ni)
        .map(|i| Row {
            orig: i,
            entries: system.entries[i].clone(),
            ops: (0..ni)
                .map(|k| if k == i { Series::monomial(0, BigRational::one()) } else { Series::zero_exact() })
                .collect(),
            mu: mu[i],
            zero: false,
        })
        .collect();
    for r in rows.iter_mut() {
        r.normalize(opts.working_depth)?;
    }
    let mut pivots: Vec<(usize, usize)>;
    loop {
        let mut order: Vec<usize> = (0..ni).filter(|&i| !rows[i].zero).collect();
        order.sort_by(|&a, &b| rows[b].mu.total_cmp(&rows[a].mu).then(a.cmp(&b)));
        pivots = Vec::new();
        let mut changed = false;
        for &i in &order {
            for &(p, pc) in &pivots {
                let c = rows[i].constant(pc);
                if c.is_zero() {
                    continue;
                }
                let f = c / rows[p].constant(pc);
                let prow = std::mem::replace(&mut rows[p], Row { orig: 0, entries: vec![], ops: vec![], mu: 0.0, zero: true });
                rows[i].sub_scaled(&prow, &f);
                rows[p] = prow;
            }
            match (0..nj).find(|&c| !rows[i].constant(c).is_zero()) {
                Some(c) => pivots.push((i, c)),
                None => {
                    rows[i].normalize(opts.working_depth)?;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let rank = pivots.len();
    let pivot_rows: Vec<usize> = pivots.iter().map(|&(p, _)| p).collect();
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mu_prime: Vec<f64> = pivot_rows.iter().map(|&p| rows[p].mu).collect();
    let eliminated: Vec<usize> = (0..ni).filter(|&i| rows[i].zero).collect();
    let mut transform: Vec<Vec<Series>> = pivot_rows.iter().map(|&p| rows[p].entries.clone()).collect();
    for c in (0..nj).filter(|c| !pivot_cols.contains(c)) {
        transform.push(
            (0..nj)
                .map(|j| if j == c { Series::monomial(0, BigRational::one()) } else { Series::zero_exact() })
                .collect(),
        );
    }
    let trunc = system.truncation_order;
    Ok(RowReduction {
        row_ops: SeriesMatrix { entries: rows.iter().map(|r| r.ops.clone()).collect(), truncation_order: trunc },
        reduced: SeriesMatrix {
            entries: rows
                .iter()
                .map(|r| if r.zero { vec![Series::zero_exact(); nj] } else { r.entries.clone() })
                .collect(),
            truncation_order: trunc,
        },
        transform: SeriesMatrix { entries: transform, truncation_order: trunc },
        rank,
        pivot_rows,
        pivot_cols,
        mu_prime,
        eliminated,
    })
}

/// Determinant of the constant-term matrix of a square series matrix.
pub fn constant_term_det(m: &SeriesMatrix) -> BigRational {
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = m.entries.iter().map(|r| r.iter().map(|s| s.coeff(0)).collect()).collect();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let v = &a[c][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    det
}
