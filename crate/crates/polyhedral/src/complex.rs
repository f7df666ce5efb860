//! Integral polyhedral complexes built from rational simplices, with affine-integral gluings.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};
use crate::face::Face;
use crate::rational::{det, fmt_q, parse_q, qi, Q};

/// An affine-integral identification `x ↦ A x + t` of one face onto another.
#[derive(Clone, Debug, PartialEq)]
pub struct Gluing {
    /// Vertex ids (into the complex vertex table) of the identified face.
    pub from: Vec<usize>,
    /// Vertex ids of the image face.
    pub to: Vec<usize>,
    pub linear: Vec<Vec<i64>>,
    pub translation: Vec<i64>,
    from_face: Face,
}

impl Gluing {
    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.linear
            .iter()
            .zip(&self.translation)
            .map(|(row, &t)| row.iter().zip(x).fold(qi(t), |acc, (&a, xi)| acc + qi(a) * xi))
            .collect()
    }

    pub fn from_face(&self) -> &Face {
        &self.from_face
    }
}

/// A finite union of rational simplices ("cells"), closed under faces, with optional gluings.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralPolyhedralComplex {
    ambient_dim: usize,
    dim: usize,
    cells: Vec<Face>,
    vertices: Vec<Vec<Q>>,
    cell_vertices: Vec<Vec<usize>>,
    gluings: Vec<Gluing>,
}

/// JSON description of one cell: vertices as `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FaceSpec {
    pub vertices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

/// JSON description of a gluing `x ↦ matrix · x + translation` applied to the face `from`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GluingSpec {
    pub from: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    pub translation: Vec<String>,
}

/// JSON description of a complex.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexSpec {
    pub faces: Vec<FaceSpec>,
    #[serde(default)]
    pub gluings: Vec<GluingSpec>,
}

fn parse_point(p: &[String]) -> Result<Vec<Q>> {
    p.iter().map(|s| parse_q(s)).collect()
}

/// Validates a complex description.
pub fn build_complex(spec: &ComplexSpec) -> Result<IntegralPolyhedralComplex> {
    let mut cells = Vec::with_capacity(spec.faces.len());
    for f in &spec.faces {
        let verts = f.vertices.iter().map(|v| parse_point(v)).collect::<Result<Vec<_>>>()?;
        cells.push(Face::new(verts, f.multiplicities.clone(), f.weight.unwrap_or(1.0))?);
    }
    let mut gluings = Vec::with_capacity(spec.gluings.len());
    for g in &spec.gluings {
        let from = g.from.iter().map(|v| parse_point(v)).collect::<Result<Vec<_>>>()?;
        let translation = parse_point(&g.translation)?;
        if translation.iter().any(|t| !t.is_integer()) {
            return Err(PolyError::InconsistentGluing(format!(
                "translation {:?} is not integral",
                g.translation
            )));
        }
        let translation: Vec<i64> = translation.iter().map(|t| t.to_integer()).collect();
        gluings.push((from, g.matrix.clone(), translation));
    }
    IntegralPolyhedralComplex::new(cells, gluings)
}

impl IntegralPolyhedralComplex {
    /// Builds a complex from cells and gluings given as (face vertices, optional matrix, integral translation).
    pub fn new(cells: Vec<Face>, gluings: Vec<(Vec<Vec<Q>>, Option<Vec<Vec<i64>>>, Vec<i64>)>) -> Result<Self> {
        let Some(first) = cells.first() else {
            return Err(PolyError::Invalid("complex has no faces".into()));
        };
        let ambient_dim = first.ambient_dim();
        if cells.iter().any(|c| c.ambient_dim() != ambient_dim) {
            return Err(PolyError::Invalid("faces live in different ambient dimensions".into()));
        }
        let dim = cells.iter().map(Face::dim).max().unwrap_or(0);
        let mut vertices: Vec<Vec<Q>> = Vec::new();
        let mut index: BTreeMap<Vec<Q>, usize> = BTreeMap::new();
        let mut cell_vertices = Vec::with_capacity(cells.len());
        for c in &cells {
            let mut ids: Vec<usize> = c
                .vertices()
                .iter()
                .map(|v| {
                    *index.entry(v.clone()).or_insert_with(|| {
                        vertices.push(v.clone());
                        vertices.len() - 1
                    })
                })
                .collect();
            ids.sort_unstable();
            cell_vertices.push(ids);
        }
        let mut out = Self { ambient_dim, dim, cells, vertices, cell_vertices, gluings: Vec::new() };
        for (from, matrix, translation) in gluings {
            let g = out.make_gluing(&index, from, matrix, translation)?;
            out.gluings.push(g);
        }
        Ok(out)
    }

    fn make_gluing(
        &self,
        index: &BTreeMap<Vec<Q>, usize>,
        from: Vec<Vec<Q>>,
        matrix: Option<Vec<Vec<i64>>>,
        translation: Vec<i64>,
    ) -> Result<Gluing> {
        let d = self.ambient_dim;
        let linear =
            matrix.unwrap_or_else(|| (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect());
        if linear.len() != d || linear.iter().any(|r| r.len() != d) || translation.len() != d {
            return Err(PolyError::InconsistentGluing("map dimensions do not match the complex".into()));
        }
        let a: Vec<Vec<Q>> = linear.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
        if det(&a).abs() != qi(1) {
            return Err(PolyError::InconsistentGluing("linear part is not unimodular".into()));
        }
        let lookup = |v: &Vec<Q>| {
            index
                .get(v)
                .copied()
                .ok_or_else(|| PolyError::InconsistentGluing(format!("vertex {v:?} is not a vertex of the complex")))
        };
        let mut from_ids = from.iter().map(lookup).collect::<Result<Vec<_>>>()?;
        from_ids.sort_unstable();
        if !self.is_face(&from_ids) {
            return Err(PolyError::InconsistentGluing("glued vertex set is not a face".into()));
        }
        let from_face = Face::new(from_ids.iter().map(|&i| self.vertices[i].clone()).collect(), None, 1.0)?;
        let proto = Gluing { from: from_ids.clone(), to: Vec::new(), linear, translation, from_face };
        let mut to_ids = from.iter().map(|v| lookup(&proto.apply(v))).collect::<Result<Vec<_>>>()?;
        to_ids.sort_unstable();
        if !self.is_face(&to_ids) {
            return Err(PolyError::InconsistentGluing("image of the glued face is not a face".into()));
        }
        if to_ids == from_ids {
            return Err(PolyError::InconsistentGluing("gluing maps a face onto itself".into()));
        }
        Ok(Gluing { to: to_ids, ..proto })
    }

    fn is_face(&self, ids: &[usize]) -> bool {
        self.cell_vertices.iter().any(|cv| ids.iter().all(|i| cv.contains(i)))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Face] {
        &self.cells
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    /// Indices of the cells of maximal dimension; only these carry measure.
    pub fn top_cells(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim() == self.dim).collect()
    }

    /// Applies gluings until the point is a canonical representative.
    pub fn canonical(&self, x: &[Q]) -> Vec<Q> {
        let mut p = x.to_vec();
        let limit = 4 * (self.gluings.len() + 1);
        'outer: for _ in 0..limit {
            for g in &self.gluings {
                if g.from_face.contains(&p) {
                    p = g.apply(&p);
                    continue 'outer;
                }
            }
            break;
        }
        p
    }

    /// Number of faces of each dimension after identifications.
    pub fn face_counts(&self) -> Vec<usize> {
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for cv in &self.cell_vertices {
            let k = cv.len();
            for mask in 1u64..(1u64 << k) {
                faces.insert((0..k).filter(|&i| mask >> i & 1 == 1).map(|i| cv[i]).collect());
            }
        }
        let list: Vec<Vec<usize>> = faces.into_iter().collect();
        let pos: BTreeMap<&Vec<usize>, usize> = list.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut parent: Vec<usize> = (0..list.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut c = i;
            while p[c] != r {
                let n = p[c];
                p[c] = r;
                c = n;
            }
            r
        }
        let vidx: BTreeMap<&Vec<Q>, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        for g in &self.gluings {
            let k = g.from.len();
            for mask in 1u64..(1u64 << k) {
                let sub: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| g.from[i]).collect();
                let mut img: Vec<usize> = sub
                    .iter()
                    .filter_map(|&v| vidx.get(&g.apply(&self.vertices[v])).copied())
                    .collect();
                img.sort_unstable();
                if let (Some(&a), Some(&b)) = (pos.get(&sub), pos.get(&img)) {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut counts = vec![0usize; self.dim + 1];
        for i in 0..list.len() {
            if find(&mut parent, i) == i {
                counts[list[i].len() - 1] += 1;
            }
        }
        counts
    }

    /// Serializes back to the JSON description.
    pub fn to_spec(&self) -> ComplexSpec {
        let fmt = |v: &Vec<Q>| v.iter().map(fmt_q).collect::<Vec<_>>();
        ComplexSpec {
            faces: self
                .cells
                .iter()
                .map(|c| FaceSpec {
                    vertices: c.vertices().iter().map(fmt).collect(),
                    multiplicities: c.multiplicities().map(<[u32]>::to_vec),
                    weight: Some(c.weight()),
                })
                .collect(),
            gluings: self
                .gluings
                .iter()
                .map(|g| GluingSpec {
                    from: g.from.iter().map(|&i| fmt(&self.vertices[i])).collect(),
                    matrix: Some(g.linear.clone()),
                    translation: g.translation.iter().map(|t| t.to_string()).collect(),
                })
                .collect(),
        }
    }

    /// Cells containing `x` (exact membership).
    pub fn cells_containing(&self, x: &[Q]) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].contains(x)).collect()
    }

    /// True when `x` lies in the relative interior of some top cell.
    pub fn is_interior_point(&self, x: &[Q]) -> bool {
        self.top_cells().into_iter().any(|i| self.cells[i].contains_interior(x))
    }

    /// Whether two points lie in one common cell.
    pub fn share_cell(&self, x: &[Q], y: &[Q]) -> bool {
        self.cells.iter().any(|c| c.contains(x) && c.contains(y))
    }
}

/// Helper for simple segment complexes `[a, b]` in `R^1`, optionally glued into a circle.
pub fn segment_complex(a: Q, b: Q, glue_ends: bool) -> Result<IntegralPolyhedralComplex> {
    let face = Face::new(vec![vec![a], vec![b]], None, 1.0)?;
    let gluings = if glue_ends {
        let shift = a - b;
        if !shift.is_integer() || shift.is_zero() {
            return Err(PolyError::InconsistentGluing("circle period must be a nonzero integer".into()));
        }
        vec![(vec![vec![b]], None, vec![shift.to_integer()])]
    } else {
        Vec::new()
    };
    IntegralPolyhedralComplex::new(vec![face], gluings)
}

/// The torus `R^n / diag(periods) Z^n` for `n = 1, 2` as a glued interval or triangulated rectangle.
pub fn torus_complex(periods: &[i64]) -> Result<IntegralPolyhedralComplex> {
    match periods {
        [g] => segment_complex(Q::zero(), qi(*g), true),
        [g1, g2] => {
            let (a, b) = (qi(*g1), qi(*g2));
            let z = Q::zero();
            let cells = vec![
                Face::new(vec![vec![z, z], vec![a, z], vec![a, b]], None, 1.0)?,
                Face::new(vec![vec![z, z], vec![z, b], vec![a, b]], None, 1.0)?,
            ];
            let gluings = vec![
                (vec![vec![a, z], vec![a, b]], None, vec![-g1, 0]),
                (vec![vec![z, b], vec![a, b]], None, vec![0, -g2]),
            ];
            IntegralPolyhedralComplex::new(cells, gluings)
        }
        _ => Err(PolyError::Invalid("torus complexes are provided for rank 1 and 2".into())),
    }
}

/// The torus `R^n / diag(periods) Z^n`, `n = 1, 2`, subdivided along the given breakpoints on each axis.
///
/// Each axis list must start at 0 and increase strictly below the period. In rank 2 every
/// rectangle of the grid is split along its increasing diagonal.
pub fn grid_torus_complex(breaks: &[Vec<i64>], periods: &[i64]) -> Result<IntegralPolyhedralComplex> {
    if breaks.len() != periods.len() || !(1..=2).contains(&periods.len()) {
        return Err(PolyError::Invalid("grid torus needs one breakpoint list per axis, rank 1 or 2".into()));
    }
    let mut axes = Vec::with_capacity(breaks.len());
    for (b, &g) in breaks.iter().zip(periods) {
        let ok = b.first() == Some(&0) && b.windows(2).all(|w| w[0] < w[1]) && b.last().is_some_and(|&x| x < g);
        if !ok {
            return Err(PolyError::Invalid(format!("breakpoints {b:?} do not subdivide [0, {g})")));
        }
        let mut pts: Vec<Q> = b.iter().map(|&x| qi(x)).collect();
        pts.push(qi(g));
        axes.push(pts);
    }
    let mut cells = Vec::new();
    let mut gluings = Vec::new();
    match axes.as_slice() {
        [xs] => {
            for w in xs.windows(2) {
                cells.push(Face::new(vec![vec![w[0]], vec![w[1]]], None, 1.0)?);
            }
            gluings.push((vec![vec![qi(periods[0])]], None, vec![-periods[0]]));
        }
        [xs, ys] => {
            for u in xs.windows(2) {
                for v in ys.windows(2) {
                    cells.push(Face::new(vec![vec![u[0], v[0]], vec![u[1], v[0]], vec![u[1], v[1]]], None, 1.0)?);
                    cells.push(Face::new(vec![vec![u[0], v[0]], vec![u[0], v[1]], vec![u[1], v[1]]], None, 1.0)?);
                }
            }
            let (g1, g2) = (qi(periods[0]), qi(periods[1]));
            for v in ys.windows(2) {
                gluings.push((vec![vec![g1, v[0]], vec![g1, v[1]]], None, vec![-periods[0], 0]));
            }
            for u in xs.windows(2) {
                gluings.push((vec![vec![u[0], g2], vec![u[1], g2]], None, vec![0, -periods[1]]));
            }
        }
        _ => unreachable!(),
    }
    IntegralPolyhedralComplex::new(cells, gluings)
}
