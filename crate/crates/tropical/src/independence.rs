//! Exponent equivalence classes and the valuative-independence check.

use std::collections::BTreeMap;

use nacy_polyhedral::{fmt_q, Face, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Result, TropicalError};
use crate::regions::dominant_regions;
use crate::section::TropicalSection;

/// Canonical representative of `α` modulo `Z·b`.
pub fn class_key(alpha: &[i64], b: &[i64]) -> Vec<i64> {
    match b.iter().position(|&x| x != 0) {
        None => alpha.to_vec(),
        Some(j) => {
            let n = alpha[j].div_euclid(b[j].abs()) * b[j].signum();
            alpha.iter().zip(b).map(|(a, bi)| a - n * bi).collect()
        }
    }
}

/// Partition of `terms` into classes modulo `Z·b`, as index lists in order of first appearance.
pub fn exponent_classes(terms: &[Vec<i64>], b: &[i64]) -> Result<Vec<Vec<usize>>> {
    let mut order: Vec<Vec<i64>> = Vec::new();
    let mut classes: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, a) in terms.iter().enumerate() {
        if a.len() != b.len() {
            return Err(TropicalError::DimensionMismatch { expected: b.len(), got: a.len() });
        }
        let k = class_key(a, b);
        if !classes.contains_key(&k) {
            order.push(k.clone());
        }
        classes.entry(k).or_default().push(i);
    }
    Ok(order.into_iter().map(|k| classes.remove(&k).unwrap()).collect())
}

/// Dependence certificate: sections in one class whose leading coefficients are linearly dependent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DependenceWitness {
    pub region: usize,
    #[serde(serialize_with = "ser_point")]
    pub witness_point: Vec<Q>,
    pub class_key: Vec<i64>,
    pub sections: Vec<usize>,
    /// Primitive integer kernel vector, first nonzero entry positive, indexed like `sections`.
    pub kernel: Vec<i64>,
}

fn ser_point<S: serde::Serializer>(p: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(fmt_q))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Independent { regions: usize },
    Dependent(DependenceWitness),
}

impl Verdict {
    pub fn is_independent(&self) -> bool {
        matches!(self, Verdict::Independent { .. })
    }
}

/// Class key of a dominant term: presented faces reduce `α` modulo `Z·b`; affine charts treat `t`
/// as its own coordinate, so `(α, k)` is reduced modulo `(0, …, 0, 1)`, which leaves `α`.
fn term_class(face: &Face, alpha: &[i64]) -> Vec<i64> {
    match face.multiplicities() {
        Some(b) => class_key(alpha, &b.iter().map(|&x| i64::from(x)).collect::<Vec<_>>()),
        None => alpha.to_vec(),
    }
}

/// Checks independence at one exact point, where each section must have a unique dominant term.
pub fn check_at_point(
    sections: &[TropicalSection],
    face: &Face,
    x: &[Q],
    coeffs: &BTreeMap<usize, Vec<Q>>,
    region: usize,
) -> Result<Verdict> {
    let mut classes: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (si, s) in sections.iter().enumerate() {
        let arg = s.argmin_q(x);
        if arg.len() != 1 {
            return Err(TropicalError::TieOnRegion { region, section: si });
        }
        classes.entry(term_class(face, &s.terms[arg[0]].exponent)).or_default().push(si);
    }
    for (key, members) in classes {
        if members.len() < 2 {
            // A single nonzero vector is independent; a zero vector is its own witness.
            let s = &sections[members[0]];
            let id = s.terms[s.argmin_q(x)[0]].coeff_id;
            let v = coeffs.get(&id).ok_or(TropicalError::MissingCoefficient(id))?;
            if v.iter().all(Zero::is_zero) {
                return Ok(Verdict::Dependent(DependenceWitness {
                    region,
                    witness_point: x.to_vec(),
                    class_key: key,
                    sections: members,
                    kernel: vec![1],
                }));
            }
            continue;
        }
        let mut vecs = Vec::with_capacity(members.len());
        for &si in &members {
            let s = &sections[si];
            let id = s.terms[s.argmin_q(x)[0]].coeff_id;
            vecs.push(coeffs.get(&id).ok_or(TropicalError::MissingCoefficient(id))?.clone());
        }
        if let Some(kernel) = kernel_vector(&vecs)? {
            return Ok(Verdict::Dependent(DependenceWitness {
                region,
                witness_point: x.to_vec(),
                class_key: key,
                sections: members,
                kernel,
            }));
        }
    }
    Ok(Verdict::Independent { regions: 1 })
}

/// Valuative independence on every dominant region of the face.
pub fn check_valuative_independence(
    sections: &[TropicalSection],
    face: &Face,
    coeffs: &BTreeMap<usize, Vec<Q>>,
) -> Result<Verdict> {
    let decomposition = dominant_regions(sections, face)?;
    for (ri, r) in decomposition.regions.iter().enumerate() {
        if let Some(si) = r.tie.iter().position(|&t| t) {
            return Err(TropicalError::TieOnRegion { region: ri, section: si });
        }
        if let v @ Verdict::Dependent(_) = check_at_point(sections, face, &r.witness, coeffs, ri)? {
            return Ok(v);
        }
    }
    Ok(Verdict::Independent { regions: decomposition.regions.len() })
}

/// Nonzero `c` with `Σ c_i v_i = 0`, normalized to a primitive integer vector with first nonzero entry positive.
pub fn kernel_vector(vectors: &[Vec<Q>]) -> Result<Option<Vec<i64>>> {
    let n = vectors.len();
    let dim = vectors.iter().map(Vec::len).max().unwrap_or(0);
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(TropicalError::DimensionMismatch { expected: dim, got: vectors.iter().map(Vec::len).min().unwrap_or(0) });
    }
    // Columns are the vectors; rows the coordinates.
    let to_big = |q: &Q| BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()));
    let mut m: Vec<Vec<BigRational>> = (0..dim).map(|r| vectors.iter().map(|v| to_big(&v[r])).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(p) = (row..dim).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][c].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..dim {
            if i != row && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..n {
                    let v = &m[row][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    let Some(free) = (0..n).find(|c| !pivots.contains(c)) else {
        return Ok(None);
    };
    let mut k = vec![BigRational::zero(); n];
    k[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        k[pc] = -m[r][free].clone();
    }
    let den = k.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = k.iter().map(|q| (q * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = if ints.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) { -1 } else { 1 };
    let out = ints
        .iter()
        .map(|x| {
            let v: BigInt = x / &g * sign;
            i64::try_from(v).map_err(|_| TropicalError::Invalid("kernel entry overflows i64".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(out))
}
