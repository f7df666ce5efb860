//! Rational point lattices and discrete measures on complexes.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::IntegralPolyhedralComplex;
use crate::error::{PolyError, Result};
use crate::face::{face_measure, Face};
use crate::rational::{ceil_q, floor_q, inverse, q_to_f64, qi, rational_content, Q};

/// A point of a complex together with the index of a cell containing it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TaggedPoint {
    #[serde(with = "crate::rational::serde_q::vec")]
    pub coords: Vec<Q>,
    pub face: usize,
}

/// Finitely supported measure on a complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    #[serde(with = "crate::rational::serde_q::vec2")]
    pub points: Vec<Vec<Q>>,
    pub faces: Vec<usize>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Vec<Q>>, faces: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() || faces.len() != points.len() {
            return Err(PolyError::Invalid("points, faces and weights differ in length".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(PolyError::Invalid("weights must be finite and non-negative".into()));
        }
        Ok(Self { points, faces, weights })
    }

    /// Uniform probability measure on the given points.
    pub fn uniform(points: Vec<TaggedPoint>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(PolyError::Invalid("no points".into()));
        }
        let (pts, faces) = points.into_iter().map(|p| (p.coords, p.face)).unzip();
        Self::new(pts, faces, vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Rescales to total mass one.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.total_mass();
        if m <= 0.0 {
            return Err(PolyError::Invalid("cannot normalize a measure of zero mass".into()));
        }
        Ok(Self { weights: self.weights.iter().map(|w| w / m).collect(), ..self.clone() })
    }

    pub fn coords_f64(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.iter().map(q_to_f64).collect()).collect()
    }

    /// Weight at an exact point, zero when absent.
    pub fn point_mass(&self, x: &[Q]) -> f64 {
        self.points.iter().position(|p| p == x).map_or(0.0, |i| self.weights[i])
    }

    pub fn index_of(&self, x: &[Q]) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }
}

/// Sum with pairwise (cascade) reduction to keep rounding error logarithmic.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Points of `l · cell` with integer coordinates, divided back by `l`.
fn cell_points(cell: &Face, l: i64) -> Vec<Vec<Q>> {
    let lq = qi(l);
    let v0: Vec<Q> = cell.vertices()[0].iter().map(|x| x * lq).collect();
    let dirs: Vec<Vec<Q>> = cell.directions().iter().map(|d| d.iter().map(|x| x * lq).collect()).collect();
    let k = dirs.len();
    let d = v0.len();
    if k == 0 {
        return if v0.iter().all(|x| x.is_integer()) { vec![cell.vertices()[0].clone()] } else { Vec::new() };
    }
    // Pick k coordinates on which the directions are independent.
    let mut chosen: Vec<usize> = Vec::new();
    let mut inv = None;
    for combo in combinations(d, k) {
        let m: Vec<Vec<Q>> = combo.iter().map(|&c| dirs.iter().map(|dv| dv[c]).collect()).collect();
        if let Some(mi) = inverse(&m) {
            chosen = combo;
            inv = Some(mi);
            break;
        }
    }
    let inv = inv.expect("face directions are independent");
    let lo: Vec<i64> = chosen
        .iter()
        .map(|&c| cell.vertices().iter().map(|v| ceil_q(&(v[c] * lq))).min().unwrap())
        .collect();
    let hi: Vec<i64> = chosen
        .iter()
        .map(|&c| cell.vertices().iter().map(|v| floor_q(&(v[c] * lq))).max().unwrap())
        .collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return out;
    }
    loop {
        let rhs: Vec<Q> = chosen.iter().zip(&cur).map(|(&c, &y)| qi(y) - v0[c]).collect();
        let lam: Vec<Q> = inv.iter().map(|row| row.iter().zip(&rhs).fold(Q::zero(), |a, (x, y)| a + x * y)).collect();
        let s = lam.iter().fold(Q::zero(), |a, x| a + x);
        if lam.iter().all(|x| !x.is_negative()) && s <= qi(1) {
            let y: Vec<Q> =
                (0..d).map(|c| v0[c] + dirs.iter().zip(&lam).fold(Q::zero(), |a, (dv, t)| a + dv[c] * t)).collect();
            if y.iter().all(|x| x.is_integer()) {
                out.push(y.into_iter().map(|x| x / lq).collect());
            }
        }
        // Odometer increment over the box.
        let mut i = 0;
        loop {
            if i == cur.len() {
                return out;
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
            i += 1;
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All points of the complex in `(1/l) Z^d`, deduplicated across shared faces and gluings, sorted.
pub fn rational_points(complex: &IntegralPolyhedralComplex, l: u32) -> Vec<TaggedPoint> {
    let l = i64::from(l.max(1));
    let mut seen: BTreeMap<Vec<Q>, usize> = BTreeMap::new();
    for (ci, cell) in complex.cells().iter().enumerate() {
        for p in cell_points(cell, l) {
            let p = if complex.gluings().is_empty() { p } else { complex.canonical(&p) };
            seen.entry(p).or_insert(ci);
        }
    }
    seen.into_iter().map(|(coords, face)| TaggedPoint { coords, face }).collect()
}

/// Per-top-cell quadrature weights; `None` means each cell's own weight.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureWeights {
    pub per_cell: Option<Vec<f64>>,
}

/// Lumped piecewise-linear quadrature on the barycentric grid at level `ceil(1/h)`.
///
/// Every top cell is split into `N^k` small simplices, where `N` makes the grid nodes
/// exactly the rational points of the cell at that level, and each node receives an
/// equal share of the measure of every small simplex it belongs to.
pub fn quadrature(complex: &IntegralPolyhedralComplex, h: Q, weights: &MeasureWeights) -> Result<DiscreteMeasure> {
    if !h.is_positive() {
        return Err(PolyError::Invalid("resolution must be positive".into()));
    }
    let l = ceil_q(&h.recip());
    let tops = complex.top_cells();
    if let Some(w) = &weights.per_cell {
        if w.len() != tops.len() {
            return Err(PolyError::Invalid(format!("expected {} face weights, got {}", tops.len(), w.len())));
        }
    }
    let mut acc: BTreeMap<Vec<Q>, (usize, f64)> = BTreeMap::new();
    for (ti, &ci) in tops.iter().enumerate() {
        let cell = &complex.cells()[ci];
        let k = cell.dim();
        if k > 2 {
            return Err(PolyError::UnsupportedDimension(k));
        }
        let fw = weights.per_cell.as_ref().map_or(cell.weight(), |w| w[ti]);
        let mass = face_measure(cell, fw)?.total_mass;
        let dirs = cell.directions();
        let n = qi(l) * rational_content(dirs.iter().flatten());
        let v0 = &cell.vertices()[0];
        if !n.is_integer() || n < qi(1) || v0.iter().any(|x| !(x * qi(l)).is_integer()) {
            return Err(PolyError::ResolutionTooCoarse(format!(
                "level {l} does not resolve the vertices of face {ci}"
            )));
        }
        let n = n.to_integer();
        let node = |idx: &[i64]| -> Vec<Q> {
            (0..v0.len())
                .map(|c| v0[c] + dirs.iter().zip(idx).fold(Q::zero(), |a, (d, &i)| a + d[c] * Q::new(i, n)))
                .collect()
        };
        let mut add = |x: Vec<Q>, w: f64| {
            let x = if complex.gluings().is_empty() { x } else { complex.canonical(&x) };
            acc.entry(x).or_insert((ci, 0.0)).1 += w;
        };
        match k {
            1 => {
                let share = mass / n as f64 / 2.0;
                for i in 0..n {
                    add(node(&[i]), share);
                    add(node(&[i + 1]), share);
                }
            }
            2 => {
                let share = mass / (n * n) as f64 / 3.0;
                for i in 0..n {
                    for j in 0..n - i {
                        for v in [[i, j], [i + 1, j], [i, j + 1]] {
                            add(node(&v), share);
                        }
                        if i + j + 2 <= n {
                            for v in [[i + 1, j], [i, j + 1], [i + 1, j + 1]] {
                                add(node(&v), share);
                            }
                        }
                    }
                }
            }
            _ => return Err(PolyError::ZeroDimensionalFace),
        }
    }
    let mut points = Vec::with_capacity(acc.len());
    let mut faces = Vec::with_capacity(acc.len());
    let mut ws = Vec::with_capacity(acc.len());
    for (p, (f, w)) in acc {
        points.push(p);
        faces.push(f);
        ws.push(w);
    }
    DiscreteMeasure::new(points, faces, ws)
}

/// Total continuous mass of the top cells.
pub fn continuous_mass(complex: &IntegralPolyhedralComplex, weights: &MeasureWeights) -> Result<f64> {
    let tops = complex.top_cells();
    let mut total = 0.0;
    for (ti, &ci) in tops.iter().enumerate() {
        let cell = &complex.cells()[ci];
        let fw = weights.per_cell.as_ref().map_or(cell.weight(), |w| w[ti]);
        total += face_measure(cell, fw)?.total_mass;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{segment_complex, torus_complex};

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn segment_points() {
        let c = segment_complex(qi(0), qi(1), false).unwrap();
        let pts: Vec<Vec<Q>> = rational_points(&c, 3).into_iter().map(|p| p.coords).collect();
        assert_eq!(pts, vec![vec![qi(0)], vec![q(1, 3)], vec![q(2, 3)], vec![qi(1)]]);
    }

    #[test]
    fn circle_points() {
        let c = segment_complex(qi(0), qi(1), true).unwrap();
        let pts: Vec<Vec<Q>> = rational_points(&c, 4).into_iter().map(|p| p.coords).collect();
        assert_eq!(pts, vec![vec![qi(0)], vec![q(1, 4)], vec![q(1, 2)], vec![q(3, 4)]]);
    }

    #[test]
    fn trapezoid_and_circle_quadrature() {
        let seg = segment_complex(qi(0), qi(1), false).unwrap();
        let m = quadrature(&seg, q(1, 4), &MeasureWeights::default()).unwrap();
        assert_eq!(m.weights, vec![0.125, 0.25, 0.25, 0.25, 0.125]);
        let circ = segment_complex(qi(0), qi(1), true).unwrap();
        let m = quadrature(&circ, q(1, 4), &MeasureWeights::default()).unwrap();
        assert_eq!(m.weights, vec![0.25; 4]);
    }

    #[test]
    fn simplex_quadrature() {
        let s = IntegralPolyhedralComplex::new(vec![Face::simplex(&[1, 1, 1]).unwrap()], vec![]).unwrap();
        let m = quadrature(&s, q(1, 2), &MeasureWeights::default()).unwrap();
        assert_eq!(m.len(), 6);
        assert!((m.total_mass() - 0.5).abs() < 1e-15);
        // Corners touch one small triangle, edge midpoints three.
        let corner = m.point_mass(&[qi(1), qi(0), qi(0)]);
        let mid = m.point_mass(&[q(1, 2), q(1, 2), qi(0)]);
        assert!((mid - 3.0 * corner).abs() < 1e-15);
    }

    #[test]
    fn torus_quadrature_is_uniform() {
        let t = torus_complex(&[1, 1]).unwrap();
        let m = quadrature(&t, q(1, 4), &MeasureWeights::default()).unwrap();
        assert_eq!(m.len(), 16);
        for w in &m.weights {
            assert!((w - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coarse_resolution_rejected() {
        let c = segment_complex(q(1, 3), qi(1), false).unwrap();
        assert!(matches!(
            quadrature(&c, q(1, 2), &MeasureWeights::default()),
            Err(PolyError::ResolutionTooCoarse(_))
        ));
    }
}
