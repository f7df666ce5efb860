//! Facets and pulling triangulations of small exact point configurations.

use std::collections::BTreeSet;

use nacy_polyhedral::rational::{dot_q, integer_nullspace, rank, sub_q};
use nacy_polyhedral::{qi, Q};
use num_traits::{Signed, Zero};

/// A facet `{⟨normal, x⟩ = offset}` of a full-dimensional configuration, with every point
/// satisfying `⟨normal, x⟩ ≥ offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub normal: Vec<Q>,
    pub offset: Q,
    /// Indices of the points on the facet, increasing.
    pub members: Vec<usize>,
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
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

/// Affine dimension of the points.
pub fn affine_dim(points: &[Vec<Q>]) -> usize {
    match points.split_first() {
        None => 0,
        Some((p0, rest)) => rank(&rest.iter().map(|p| sub_q(p, p0)).collect::<Vec<_>>()),
    }
}

/// Facets of a configuration of full affine dimension in its ambient space.
pub fn facets(points: &[Vec<Q>]) -> Vec<Facet> {
    let k = points.first().map_or(0, Vec::len);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for combo in combinations(points.len(), k) {
        let p0 = &points[combo[0]];
        let rows: Vec<Vec<Q>> = combo[1..].iter().map(|&i| sub_q(&points[i], p0)).collect();
        if rank(&rows) + 1 != k {
            continue;
        }
        let kernel = integer_nullspace(&rows, k);
        let Some(n) = kernel.first() else { continue };
        let mut normal: Vec<Q> = n.iter().map(|&x| qi(x)).collect();
        let side: Vec<Q> = points.iter().map(|q| dot_q(&normal, &sub_q(q, p0))).collect();
        if side.iter().any(Q::is_negative) {
            if side.iter().any(Q::is_positive) {
                continue;
            }
            normal.iter_mut().for_each(|x| *x = -*x);
        }
        let members: Vec<usize> = (0..points.len()).filter(|&i| side[i].is_zero()).collect();
        if seen.insert(members.clone()) {
            let offset = dot_q(&normal, p0);
            out.push(Facet { normal, offset, members });
        }
    }
    out
}

/// Indices of the points that are vertices of their convex hull.
pub fn hull_vertices(points: &[Vec<Q>]) -> Vec<usize> {
    let k = points.first().map_or(0, Vec::len);
    let fs = facets(points);
    (0..points.len())
        .filter(|&i| {
            let normals: Vec<Vec<Q>> = fs.iter().filter(|f| f.members.contains(&i)).map(|f| f.normal.clone()).collect();
            rank(&normals) == k
        })
        .collect()
}

/// Coordinates on which the affine span of the points projects isomorphically.
fn chart(points: &[Vec<Q>], k: usize) -> Vec<usize> {
    let d = points[0].len();
    let dirs: Vec<Vec<Q>> = points[1..].iter().map(|p| sub_q(p, &points[0])).collect();
    combinations(d, k)
        .into_iter()
        .find(|c| rank(&dirs.iter().map(|v| c.iter().map(|&j| v[j]).collect()).collect::<Vec<Vec<Q>>>()) == k)
        .expect("affine span has a coordinate chart")
}

/// Pulling triangulation of the convex hull of `points[idx]`, which must all be hull vertices.
///
/// Points are pulled in increasing index order, so triangulations of two polytopes agree on a
/// shared face. Simplices are returned as increasing index lists.
pub fn pulling_triangulation(points: &[Vec<Q>], idx: &[usize]) -> Vec<Vec<usize>> {
    let sub: Vec<Vec<Q>> = idx.iter().map(|&i| points[i].clone()).collect();
    let k = affine_dim(&sub);
    if k == 0 {
        return vec![vec![idx[0]]];
    }
    let coords = chart(&sub, k);
    let local: Vec<Vec<Q>> = sub.iter().map(|p| coords.iter().map(|&j| p[j]).collect()).collect();
    if k == 1 {
        let lo = (0..idx.len()).min_by(|&a, &b| local[a][0].cmp(&local[b][0])).unwrap();
        let hi = (0..idx.len()).max_by(|&a, &b| local[a][0].cmp(&local[b][0])).unwrap();
        let mut s = vec![idx[lo], idx[hi]];
        s.sort_unstable();
        return vec![s];
    }
    let apex = (0..idx.len()).min_by_key(|&a| idx[a]).unwrap();
    let mut out = Vec::new();
    for f in facets(&local) {
        if f.members.contains(&apex) {
            continue;
        }
        let face: Vec<usize> = f.members.iter().map(|&m| idx[m]).collect();
        for mut s in pulling_triangulation(points, &face) {
            s.push(idx[apex]);
            s.sort_unstable();
            out.push(s);
        }
    }
    out.sort();
    out
}
