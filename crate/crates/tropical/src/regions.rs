//! Decomposition of a face into open domains on which each section has one dominant term.

use nacy_polyhedral::{qi, Face, Q};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Result, TropicalError};
use crate::section::{face_point, TropicalSection};

/// Open domain of the face on which dominant terms are constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    /// Corner points of the closure of the domain, in ambient coordinates.
    #[serde(serialize_with = "ser_points")]
    pub corners: Vec<Vec<Q>>,
    /// An exact interior point.
    #[serde(serialize_with = "ser_point")]
    pub witness: Vec<Q>,
    /// Per section: index of the dominant term (lowest index on ties).
    pub dominant: Vec<usize>,
    /// Per section: true when several terms attain the minimum on the whole domain.
    pub tie: Vec<bool>,
}

fn ser_point<S: serde::Serializer>(p: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(nacy_polyhedral::fmt_q))
}

fn ser_points<S: serde::Serializer>(p: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(|x| x.iter().map(nacy_polyhedral::fmt_q).collect::<Vec<_>>()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionDecomposition {
    pub regions: Vec<Region>,
    /// Number of distinct wall hyperplanes separating regions with different dominant terms.
    pub walls: usize,
    /// True when some section has everywhere-tied terms.
    pub degenerate: bool,
}

/// Affine function `c[0] + Σ_j c[j] λ_j` of the barycentric parameters `λ_1..λ_k`.
type Affine = Vec<Q>;

fn term_affine(face: &Face, section: &TropicalSection, term: usize) -> Affine {
    let t = &section.terms[term];
    let v: Vec<Q> = face.vertices().iter().map(|p| t.value_q(p)).collect();
    let mut a = vec![v[0]];
    a.extend(v[1..].iter().map(|x| x - v[0]));
    a
}

fn eval(a: &Affine, lam: &[Q]) -> Q {
    a[1..].iter().zip(lam).fold(a[0], |acc, (c, l)| acc + c * l)
}

fn to_bary(lam: &[Q]) -> Vec<Q> {
    let mut b = vec![qi(1) - lam.iter().fold(Q::zero(), |a, x| a + x)];
    b.extend_from_slice(lam);
    b
}

/// Splits a convex polygon by the line `w = 0`; returns the non-degenerate sides.
fn split(poly: &[Vec<Q>], w: &Affine) -> Vec<Vec<Vec<Q>>> {
    let vals: Vec<Q> = poly.iter().map(|p| eval(w, p)).collect();
    if vals.iter().all(|v| !v.is_negative()) || vals.iter().all(|v| !v.is_positive()) {
        return vec![poly.to_vec()];
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let n = poly.len();
    for i in 0..n {
        let (p, vp) = (&poly[i], vals[i]);
        let (q, vq) = (&poly[(i + 1) % n], vals[(i + 1) % n]);
        if !vp.is_negative() {
            pos.push(p.clone());
        }
        if !vp.is_positive() {
            neg.push(p.clone());
        }
        if (vp.is_positive() && vq.is_negative()) || (vp.is_negative() && vq.is_positive()) {
            let s = vp / (vp - vq);
            let x: Vec<Q> = p.iter().zip(q).map(|(a, b)| a + s * (b - a)).collect();
            pos.push(x.clone());
            neg.push(x);
        }
    }
    [pos, neg].into_iter().filter(|p| area2(p) != Q::zero()).collect()
}

fn area2(poly: &[Vec<Q>]) -> Q {
    if poly.len() < 3 {
        return Q::zero();
    }
    let n = poly.len();
    (0..n)
        .fold(Q::zero(), |acc, i| {
            let (p, q) = (&poly[i], &poly[(i + 1) % n]);
            acc + p[0] * q[1] - p[1] * q[0]
        })
        .abs()
}

/// Convex hull (counter-clockwise, no collinear points) by monotone chain.
fn convex_hull(mut pts: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &Vec<Q>, a: &Vec<Q>, b: &Vec<Q>| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<Vec<Q>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<Q>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn centroid(poly: &[Vec<Q>]) -> Vec<Q> {
    let n = qi(poly.len() as i64);
    (0..poly[0].len()).map(|c| poly.iter().fold(Q::zero(), |a, p| a + p[c]) / n).collect()
}

/// Splits a segment `[a, b]` (in one λ-coordinate) at the zero of `w`, if interior.
fn split_segment(seg: &[Vec<Q>], w: &Affine) -> Vec<Vec<Vec<Q>>> {
    let (va, vb) = (eval(w, &seg[0]), eval(w, &seg[1]));
    if (va.is_positive() && vb.is_negative()) || (va.is_negative() && vb.is_positive()) {
        let t = seg[0][0] + va / (va - vb) * (seg[1][0] - seg[0][0]);
        vec![vec![seg[0].clone(), vec![t]], vec![vec![t], seg[1].clone()]]
    } else {
        vec![seg.to_vec()]
    }
}

/// Refines a cell until, for every section, one term is minimal at every corner.
///
/// A term minimal at all corners of a convex cell is minimal on the whole cell, since the
/// difference of two terms is affine. Cells are cut only along walls that violate this, which
/// keeps the arrangement close to the tropical subdivision.
fn refine(start: Vec<Vec<Q>>, affines: &[Vec<Affine>]) -> Vec<Vec<Vec<Q>>> {
    let mut done = Vec::new();
    let mut stack = vec![start];
    'cells: while let Some(cell) = stack.pop() {
        if cell.len() <= 1 {
            done.push(cell);
            continue;
        }
        let c = centroid(&cell);
        for terms in affines {
            let vals: Vec<Q> = terms.iter().map(|a| eval(a, &c)).collect();
            let i = (0..vals.len()).min_by(|&a, &b| vals[a].cmp(&vals[b])).expect("sections are non-empty");
            for (j, fj) in terms.iter().enumerate() {
                if j == i {
                    continue;
                }
                let diff: Affine = terms[i].iter().zip(fj).map(|(a, b)| a - b).collect();
                if cell.iter().any(|p| eval(&diff, p).is_positive()) {
                    let parts = if cell[0].len() == 1 { split_segment(&cell, &diff) } else { split(&cell, &diff) };
                    debug_assert!(parts.len() == 2);
                    stack.extend(parts);
                    continue 'cells;
                }
            }
        }
        done.push(cell);
    }
    done
}

/// Exact decomposition of a face of dimension at most two.
pub fn dominant_regions(sections: &[TropicalSection], face: &Face) -> Result<RegionDecomposition> {
    if sections.is_empty() {
        return Err(TropicalError::Invalid("no sections".into()));
    }
    for s in sections {
        if s.exponent_len() != face.ambient_dim() {
            return Err(TropicalError::DimensionMismatch { expected: face.ambient_dim(), got: s.exponent_len() });
        }
    }
    let k = face.dim();
    let start: Vec<Vec<Q>> = match k {
        0 => vec![vec![]],
        1 => vec![vec![Q::zero()], vec![qi(1)]],
        2 => vec![vec![Q::zero(), Q::zero()], vec![qi(1), Q::zero()], vec![Q::zero(), qi(1)]],
        _ => return Err(TropicalError::UnsupportedDimension(k)),
    };
    let affines: Vec<Vec<Affine>> =
        sections.iter().map(|s| (0..s.terms.len()).map(|i| term_affine(face, s, i)).collect()).collect();
    let cells = refine(start, &affines);
    // Group cells by their dominant data; each group is convex (an intersection of convex domains).
    let mut degenerate = false;
    let mut groups: Vec<((Vec<usize>, Vec<bool>), Vec<Vec<Q>>)> = Vec::new();
    for c in &cells {
        let witness = face_point(face, &to_bary(&centroid(c)));
        let mut dominant = Vec::with_capacity(sections.len());
        let mut tie = Vec::with_capacity(sections.len());
        for s in sections {
            let arg = s.argmin_q(&witness);
            dominant.push(arg[0]);
            tie.push(arg.len() > 1);
            degenerate |= arg.len() > 1;
        }
        let key = (dominant, tie);
        match groups.iter_mut().find(|(g, _)| *g == key) {
            Some((_, pts)) => pts.extend(c.iter().cloned()),
            None => groups.push((key, c.clone())),
        }
    }
    let mut regions = Vec::with_capacity(groups.len());
    for ((dominant, tie), pts) in groups {
        let hull = match k {
            0 => pts,
            1 => {
                let lo = pts.iter().min().unwrap().clone();
                let hi = pts.iter().max().unwrap().clone();
                vec![lo, hi]
            }
            _ => convex_hull(pts),
        };
        let witness = face_point(face, &to_bary(&centroid(&hull)));
        let corners = hull.iter().map(|p| face_point(face, &to_bary(p))).collect();
        regions.push(Region { corners, witness, dominant, tie });
    }
    let mut separating: Vec<Affine> = Vec::new();
    for a in 0..regions.len() {
        for b in a + 1..regions.len() {
            for (si, s) in sections.iter().enumerate() {
                let (i, j) = (regions[a].dominant[si], regions[b].dominant[si]);
                if i == j {
                    continue;
                }
                let (fi, fj) = (term_affine(face, s, i), term_affine(face, s, j));
                let diff: Affine = fi.iter().zip(&fj).map(|(x, y)| x - y).collect();
                let Some(lead) = diff[1..].iter().find(|x| !x.is_zero()).copied() else { continue };
                let norm: Affine = diff.iter().map(|x| x / lead).collect();
                if !separating.contains(&norm) {
                    separating.push(norm);
                }
            }
        }
    }
    let wall_count = separating.len();
    Ok(RegionDecomposition { regions, walls: wall_count, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::section::{Label, MonomialTerm};

    fn sec(terms: &[&[i64]]) -> TropicalSection {
        let terms = terms.iter().enumerate().map(|(i, a)| MonomialTerm::new(a.to_vec(), 0, i)).collect();
        TropicalSection::new(terms, 1, Label::Tag("s".into())).unwrap()
    }

    #[test]
    fn one_wall_on_an_edge() {
        let face = Face::simplex(&[1, 1]).unwrap();
        let d = dominant_regions(&[sec(&[&[2, 0], &[1, 2]])], &face).unwrap();
        assert_eq!(d.regions.len(), 2);
        assert_eq!(d.walls, 1);
        // The wall sits at x = (2/3, 1/3).
        let wall = vec![Q::new(2, 3), Q::new(1, 3)];
        assert!(d.regions.iter().all(|r| r.corners.contains(&wall)));
        let near_e0 = d.regions.iter().find(|r| r.corners.contains(&vec![qi(1), qi(0)])).unwrap();
        assert_eq!(near_e0.dominant, vec![1]);
    }

    #[test]
    fn single_terms_have_no_walls() {
        let face = Face::simplex(&[1, 1, 1]).unwrap();
        let d = dominant_regions(&[sec(&[&[1, 0, 0]]), sec(&[&[0, 2, 1]])], &face).unwrap();
        assert_eq!(d.regions.len(), 1);
        assert_eq!(d.walls, 0);
        assert!(!d.degenerate);
    }

    #[test]
    fn triangle_split_by_two_walls() {
        let face = Face::simplex(&[1, 1, 1]).unwrap();
        let d = dominant_regions(&[sec(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])], &face).unwrap();
        // Tropical linear form: three regions meeting at the barycentre.
        let dom: std::collections::BTreeSet<usize> = d.regions.iter().map(|r| r.dominant[0]).collect();
        assert_eq!(dom.len(), 3);
        for r in &d.regions {
            assert_eq!(r.tie, vec![false]);
        }
    }

    #[test]
    fn everywhere_tied_is_flagged() {
        let face = Face::simplex(&[1, 1]).unwrap();
        let terms = vec![MonomialTerm::new(vec![1, 1], 0, 0), MonomialTerm::new(vec![0, 0], 1, 1)];
        let s = TropicalSection::new(terms, 1, Label::Tag("t".into())).unwrap();
        let d = dominant_regions(&[s], &face).unwrap();
        assert!(d.degenerate);
        assert_eq!(d.regions[0].dominant, vec![0]);
    }
}
