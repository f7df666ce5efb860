//! Reflexive polytopes, their polar duals and the toric pairing problem between boundaries.

use std::sync::Arc;

use nacy_cost::pairing_cost;
use nacy_polyhedral::{qi, quadrature, Face, IntegralPolyhedralComplex, MeasureWeights, Q};
use nacy_transport::TransportProblem;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{FamilyError, Result};
use crate::hull::{affine_dim, facets, hull_vertices, pulling_triangulation};
use crate::spec::Discretization;

#[derive(Clone, Debug, Serialize)]
pub struct ReflexivePolytopePair {
    /// Vertices of `Δ`, sorted.
    pub delta: Vec<Vec<i64>>,
    /// Vertices of `Δ^∨ = {p : ⟨x, p⟩ ≥ −1 on Δ}`, sorted.
    pub delta_dual: Vec<Vec<i64>>,
    #[serde(skip)]
    pub boundary: Arc<IntegralPolyhedralComplex>,
    #[serde(skip)]
    pub dual_boundary: Arc<IntegralPolyhedralComplex>,
}

impl ReflexivePolytopePair {
    pub fn dim(&self) -> usize {
        self.delta[0].len()
    }

    /// `(d−1)!`-normalized lattice volume of `∂Δ`, which equals `d! vol(Δ)` for reflexive `Δ`.
    pub fn boundary_volume(&self) -> f64 {
        normalized_volume(&self.boundary)
    }
}

pub(crate) fn normalized_volume(complex: &IntegralPolyhedralComplex) -> f64 {
    let k = complex.dim();
    let fact: i64 = (1..=k as i64).product();
    let v: Q = complex.top_cells().iter().map(|&c| complex.cells()[c].lattice_volume()).sum();
    (v * qi(fact)).to_f64().unwrap_or(f64::NAN)
}

fn to_q(v: &[Vec<i64>]) -> Vec<Vec<Q>> {
    v.iter().map(|p| p.iter().map(|&x| qi(x)).collect()).collect()
}

/// Vertices of the polar dual of a lattice polytope containing the origin in its interior.
///
/// Fails with `NotReflexive` when the origin is not interior or a dual vertex is not integral.
pub fn polar_dual(vertices: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let d = vertices.first().map_or(0, Vec::len);
    if d == 0 || vertices.iter().any(|v| v.len() != d) {
        return Err(FamilyError::NotReflexive("vertices must share a positive dimension".into()));
    }
    let pts = to_q(vertices);
    if affine_dim(&pts) != d {
        return Err(FamilyError::NotReflexive("polytope is not full-dimensional".into()));
    }
    let mut dual = Vec::new();
    for f in facets(&pts) {
        if !f.offset.is_negative() {
            return Err(FamilyError::NotReflexive("origin is not an interior point".into()));
        }
        let v: Vec<Q> = f.normal.iter().map(|x| x / -f.offset).collect();
        if v.iter().any(|x| !x.is_integer()) {
            return Err(FamilyError::NotReflexive(format!("facet {:?} is not at lattice distance one", f.members)));
        }
        dual.push(v.iter().map(|x| x.to_integer()).collect::<Vec<i64>>());
    }
    dual.sort();
    dual.dedup();
    Ok(dual)
}

/// Boundary complex of the convex hull, triangulated by pulling vertices in sorted order.
pub fn boundary_complex(vertices: &[Vec<i64>]) -> Result<IntegralPolyhedralComplex> {
    let pts = to_q(vertices);
    let mut cells = Vec::new();
    for f in facets(&pts) {
        for s in pulling_triangulation(&pts, &f.members) {
            cells.push(Face::new(s.iter().map(|&i| pts[i].clone()).collect(), None, 1.0)?);
        }
    }
    Ok(IntegralPolyhedralComplex::new(cells, Vec::new())?)
}

/// Validates reflexivity of `conv(delta_vertices)` and builds both boundary complexes.
pub fn toric_pair(delta_vertices: &[Vec<i64>]) -> Result<ReflexivePolytopePair> {
    let dual = polar_dual(delta_vertices)?;
    let pts = to_q(delta_vertices);
    let mut delta: Vec<Vec<i64>> = hull_vertices(&pts).into_iter().map(|i| delta_vertices[i].clone()).collect();
    delta.sort();
    if polar_dual(&dual)? != delta {
        return Err(FamilyError::NotReflexive("polar dual does not return to the polytope".into()));
    }
    Ok(ReflexivePolytopePair {
        boundary: Arc::new(boundary_complex(&delta)?),
        dual_boundary: Arc::new(boundary_complex(&dual)?),
        delta,
        delta_dual: dual,
    })
}

/// Pairing problem from `∂Δ^∨` (normalized lattice Lebesgue) to `∂Δ` (normalized lattice Lebesgue), `W ≡ 1`.
///
/// `(Lⁿ)` defaults to the normalized boundary volume.
pub fn toric_problem(pair: &ReflexivePolytopePair, disc: &Discretization, ln_norm: Option<f64>) -> Result<TransportProblem> {
    let mu0 = quadrature(&pair.dual_boundary, disc.source_h(), &MeasureWeights::default())?.normalized()?;
    let nu0 = quadrature(&pair.boundary, disc.target_h(), &MeasureWeights::default())?.normalized()?;
    let cost = pairing_cost(pair.dual_boundary.clone(), pair.boundary.clone())?;
    let ln_norm = ln_norm.unwrap_or_else(|| pair.boundary_volume());
    Ok(TransportProblem::new(cost, Arc::new(mu0), Arc::new(nu0), None, ln_norm)?)
}
