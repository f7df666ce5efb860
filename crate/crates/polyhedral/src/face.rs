//! Rational simplices with an integral structure and an optional simplex presentation.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};
use crate::rational::{
    det, dot_q, integer_kernel, integer_nullspace, q_to_f64, qi, rank, solve, sub_q, Q,
};

/// A rational simplex in `R^d`.
///
/// When `multiplicities` is present the face is presented as a subset of
/// `{x ≥ 0, Σ b_i x_i = 1}`. Faces without a presentation are affine charts in
/// which the parameter `t` is an independent monomial direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    vertices: Vec<Vec<Q>>,
    multiplicities: Option<Vec<u32>>,
    weight: f64,
    lattice_basis: Vec<Vec<i64>>,
}

/// Which coordinates a face measure is computed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureChart {
    /// `|dx_1 … dx_m|` on a standard presentation `{x ≥ 0, Σ b_i x_i = 1}`.
    Presentation,
    /// Lebesgue measure normalized so the lattice of the affine span has covolume one.
    Lattice,
}

/// Lebesgue density on a face, scaled by the face weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceMeasure {
    pub density: f64,
    pub total_mass: f64,
    pub chart: MeasureChart,
}

impl Face {
    pub fn new(vertices: Vec<Vec<Q>>, multiplicities: Option<Vec<u32>>, weight: f64) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(PolyError::DegenerateFace("no vertices".into()));
        };
        let d = first.len();
        if d == 0 || vertices.iter().any(|v| v.len() != d) {
            return Err(PolyError::DegenerateFace("vertex dimensions differ or are zero".into()));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(PolyError::Invalid(format!("face weight must be positive, got {weight}")));
        }
        let dirs: Vec<Vec<Q>> = vertices[1..].iter().map(|v| sub_q(v, first)).collect();
        if rank(&dirs) != dirs.len() {
            return Err(PolyError::DegenerateFace("vertices are not affinely independent".into()));
        }
        if let Some(b) = &multiplicities {
            if b.len() != d || b.iter().all(|&x| x == 0) {
                return Err(PolyError::NotSimplexPresentation(
                    "multiplicity vector must match the ambient dimension and be nonzero".into(),
                ));
            }
            let bq: Vec<Q> = b.iter().map(|&x| qi(x as i64)).collect();
            for v in &vertices {
                if dot_q(&bq, v) != qi(1) || v.iter().any(|x| x.is_negative()) {
                    return Err(PolyError::NotSimplexPresentation(format!(
                        "vertex {v:?} violates x >= 0, sum b_i x_i = 1"
                    )));
                }
            }
        }
        let lattice_basis = saturated_basis(&dirs, d);
        Ok(Self { vertices, multiplicities, weight, lattice_basis })
    }

    /// The standard presented simplex `{x ≥ 0, Σ b_i x_i = 1}` with vertices `e_i / b_i`.
    pub fn simplex(b: &[u32]) -> Result<Self> {
        if b.contains(&0) {
            return Err(PolyError::NotSimplexPresentation("standard simplex needs positive b".into()));
        }
        let d = b.len();
        let verts = (0..d)
            .map(|i| (0..d).map(|j| if i == j { Q::new(1, b[i] as i64) } else { Q::zero() }).collect())
            .collect();
        Self::new(verts, Some(b.to_vec()), 1.0)
    }

    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(PolyError::Invalid(format!("face weight must be positive, got {weight}")));
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn multiplicities(&self) -> Option<&[u32]> {
        self.multiplicities.as_deref()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Integral basis of the direction lattice of the affine span.
    pub fn lattice_basis(&self) -> &[Vec<i64>] {
        &self.lattice_basis
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn directions(&self) -> Vec<Vec<Q>> {
        self.vertices[1..].iter().map(|v| sub_q(v, &self.vertices[0])).collect()
    }

    /// Barycentric coordinates `(λ_0, …, λ_k)` of `x` when it lies in the affine span.
    pub fn barycentric(&self, x: &[Q]) -> Option<Vec<Q>> {
        if x.len() != self.ambient_dim() {
            return None;
        }
        let dirs = self.directions();
        let k = dirs.len();
        let rhs = sub_q(x, &self.vertices[0]);
        if k == 0 {
            return rhs.iter().all(Zero::is_zero).then(|| vec![qi(1)]);
        }
        // Least-squares normal equations are exact for points on the span; verify afterwards.
        let gram: Vec<Vec<Q>> = (0..k).map(|i| (0..k).map(|j| dot_q(&dirs[i], &dirs[j])).collect()).collect();
        let b: Vec<Q> = dirs.iter().map(|d| dot_q(d, &rhs)).collect();
        let lam = solve(&gram, &b)?;
        let recon: Vec<Q> = (0..x.len())
            .map(|c| self.vertices[0][c] + (0..k).fold(Q::zero(), |acc, i| acc + lam[i] * dirs[i][c]))
            .collect();
        if recon != x {
            return None;
        }
        let mut out = Vec::with_capacity(k + 1);
        out.push(qi(1) - lam.iter().fold(Q::zero(), |a, l| a + l));
        out.extend(lam);
        Some(out)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.barycentric(x).is_some_and(|l| l.iter().all(|v| !v.is_negative()))
    }

    /// Relative-interior test.
    pub fn contains_interior(&self, x: &[Q]) -> bool {
        self.barycentric(x).is_some_and(|l| l.iter().all(|v| v.is_positive()))
    }

    /// Floating-point membership with tolerance `tol` on barycentric coordinates and span residual.
    pub fn contains_f64(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.ambient_dim() {
            return false;
        }
        let v0: Vec<f64> = self.vertices[0].iter().map(q_to_f64).collect();
        let dirs: Vec<Vec<f64>> = self.directions().iter().map(|d| d.iter().map(q_to_f64).collect()).collect();
        let k = dirs.len();
        let rhs: Vec<f64> = x.iter().zip(&v0).map(|(a, b)| a - b).collect();
        if k == 0 {
            return rhs.iter().all(|r| r.abs() <= tol);
        }
        let Some(lam) = least_squares(&dirs, &rhs) else {
            return false;
        };
        let resid = (0..x.len())
            .map(|c| (rhs[c] - (0..k).map(|i| lam[i] * dirs[i][c]).sum::<f64>()).abs())
            .fold(0.0, f64::max);
        let l0 = 1.0 - lam.iter().sum::<f64>();
        resid <= tol && l0 >= -tol && lam.iter().all(|&l| l >= -tol)
    }

    /// Volume of the simplex measured in lattice coordinates of its affine span.
    pub fn lattice_volume(&self) -> Q {
        let k = self.dim();
        if k == 0 {
            return qi(1);
        }
        let basis: Vec<Vec<Q>> = self.lattice_basis.iter().map(|v| v.iter().map(|&x| qi(x)).collect()).collect();
        // Express each direction in the lattice basis: dir = Σ c_j basis_j.
        let gram: Vec<Vec<Q>> = (0..k).map(|i| (0..k).map(|j| dot_q(&basis[i], &basis[j])).collect()).collect();
        let coords: Vec<Vec<Q>> = self
            .directions()
            .iter()
            .map(|d| {
                let rhs: Vec<Q> = basis.iter().map(|b| dot_q(b, d)).collect();
                solve(&gram, &rhs).expect("lattice basis spans the face")
            })
            .collect();
        det(&coords).abs() / factorial(k)
    }

    /// True when the vertices are exactly `e_i / b_i`, the standard presentation.
    pub fn is_standard_presentation(&self) -> bool {
        let Some(b) = &self.multiplicities else { return false };
        if self.vertices.len() != b.len() || b.contains(&0) {
            return false;
        }
        (0..b.len()).all(|i| {
            let target: Vec<Q> =
                (0..b.len()).map(|j| if i == j { Q::new(1, b[i] as i64) } else { Q::zero() }).collect();
            self.vertices.contains(&target)
        })
    }

    pub fn centroid(&self) -> Vec<Q> {
        let n = qi(self.vertices.len() as i64);
        (0..self.ambient_dim())
            .map(|c| self.vertices.iter().fold(Q::zero(), |a, v| a + v[c]) / n)
            .collect()
    }
}

/// Lebesgue density `|dx_1 … dx_m|` on the face, scaled by `face_weight`.
///
/// Standard presented simplices use the chart that drops the first coordinate;
/// other faces use lattice coordinates of their affine span. The two agree when all `b_i = 1`.
pub fn face_measure(face: &Face, face_weight: f64) -> Result<FaceMeasure> {
    let k = face.dim();
    if k == 0 {
        return Err(PolyError::ZeroDimensionalFace);
    }
    if !(face_weight.is_finite() && face_weight > 0.0) {
        return Err(PolyError::Invalid(format!("face weight must be positive, got {face_weight}")));
    }
    let (vol, chart) = if face.is_standard_presentation() {
        let b = face.multiplicities().expect("presented");
        let v = b[1..].iter().fold(qi(1), |acc, &bi| acc / qi(bi as i64)) / factorial(k);
        (v, MeasureChart::Presentation)
    } else {
        (face.lattice_volume(), MeasureChart::Lattice)
    };
    let vol = q_to_f64(&vol);
    Ok(FaceMeasure { density: face_weight, total_mass: face_weight * vol, chart })
}

fn factorial(k: usize) -> Q {
    qi((1..=k as i64).product::<i64>().max(1))
}

fn saturated_basis(dirs: &[Vec<Q>], d: usize) -> Vec<Vec<i64>> {
    let k = dirs.len();
    if k == 0 {
        return Vec::new();
    }
    if k == d {
        return (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    }
    // The saturated lattice is the integer kernel of the orthogonal complement.
    let complement = integer_nullspace(dirs, d);
    let basis = integer_kernel(&complement, d);
    debug_assert_eq!(basis.len(), k);
    basis
}

fn least_squares(dirs: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = dirs.len();
    let mut m: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).map(|j| dot(&dirs[i], &dirs[j])).collect();
            row.push(dot(&dirs[i], rhs));
            row
        })
        .collect();
    for c in 0..k {
        let p = (c..k).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        for r in 0..k {
            if r != c {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    let v = m[c][j];
                    m[r][j] -= f * v;
                }
            }
        }
    }
    Some((0..k).map(|i| m[i][k] / m[i][i]).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn standard_simplex_measure_is_half() {
        let f = Face::simplex(&[1, 1, 1]).unwrap();
        assert_eq!(f.dim(), 2);
        let m = face_measure(&f, 1.0).unwrap();
        assert_eq!(m.chart, MeasureChart::Presentation);
        assert!((m.total_mass - 0.5).abs() < 1e-15);
        assert_eq!(f.lattice_volume(), q(1, 2));
    }

    #[test]
    fn unit_segment_mass_one() {
        let f = Face::new(vec![vec![qi(0)], vec![qi(1)]], None, 1.0).unwrap();
        assert!((face_measure(&f, 1.0).unwrap().total_mass - 1.0).abs() < 1e-15);
        assert_eq!(face_measure(&f, 3.0).unwrap().total_mass, 3.0);
    }

    #[test]
    fn presentation_chart_differs_from_lattice_for_nonunit_b() {
        let f = Face::simplex(&[2, 1]).unwrap();
        assert_eq!(face_measure(&f, 1.0).unwrap().total_mass, 1.0);
        assert_eq!(f.lattice_volume(), q(1, 2));
    }

    #[test]
    fn zero_dimensional_face_has_no_measure() {
        let f = Face::new(vec![vec![qi(1), qi(0)]], None, 1.0).unwrap();
        assert_eq!(face_measure(&f, 1.0), Err(PolyError::ZeroDimensionalFace));
    }

    #[test]
    fn rejects_bad_presentation_and_degenerate() {
        let bad = Face::new(vec![vec![qi(1), qi(1)], vec![qi(0), qi(1)]], Some(vec![1, 1]), 1.0);
        assert!(matches!(bad, Err(PolyError::NotSimplexPresentation(_))));
        let deg = Face::new(vec![vec![qi(0)], vec![qi(1)], vec![qi(2)]], None, 1.0);
        assert!(matches!(deg, Err(PolyError::DegenerateFace(_))));
    }

    #[test]
    fn lattice_basis_of_slanted_facet() {
        // Facet of the P^3 anticanonical polytope on x + y + z = 1, edge vectors of lattice length 4.
        let f = Face::new(
            vec![
                vec![qi(3), qi(-1), qi(-1)],
                vec![qi(-1), qi(3), qi(-1)],
                vec![qi(-1), qi(-1), qi(3)],
            ],
            None,
            1.0,
        )
        .unwrap();
        assert_eq!(f.lattice_basis().len(), 2);
        assert_eq!(f.lattice_volume(), qi(8));
    }

    #[test]
    fn membership() {
        let f = Face::simplex(&[1, 1]).unwrap();
        assert!(f.contains(&[q(1, 2), q(1, 2)]));
        assert!(!f.contains(&[q(3, 2), q(-1, 2)]));
        assert!(!f.contains(&[q(1, 2), q(1, 3)]));
        assert!(f.contains_interior(&[q(1, 3), q(2, 3)]));
        assert!(!f.contains_interior(&[qi(1), qi(0)]));
        assert!(f.contains_f64(&[0.25, 0.75], 1e-12));
        assert!(!f.contains_f64(&[0.25, 0.8], 1e-12));
    }
}
