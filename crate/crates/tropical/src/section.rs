//! Sections as finite sums of monomial terms and their min-plus valuations.

use std::collections::{BTreeMap, BTreeSet};

use nacy_polyhedral::{fmt_q, parse_q, q_to_f64, qi, Face, FaceSpec, Q};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TropicalError};

/// One term `f_α t^k z^α` of a local expansion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialTerm {
    pub exponent: Vec<i64>,
    pub t_order: i64,
    pub coeff_id: usize,
}

impl MonomialTerm {
    pub fn new(exponent: Vec<i64>, t_order: i64, coeff_id: usize) -> Self {
        Self { exponent, t_order, coeff_id }
    }

    /// `⟨x, α⟩ + k` in floating point.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.exponent.iter().zip(x).map(|(&a, &xi)| a as f64 * xi).sum::<f64>() + self.t_order as f64
    }

    /// `⟨x, α⟩ + k` exactly.
    pub fn value_q(&self, x: &[Q]) -> Q {
        self.exponent.iter().zip(x).fold(qi(self.t_order), |acc, (&a, xi)| acc + qi(a) * xi)
    }
}

/// What a section is indexed by: a rational point of the target complex, or a free tag.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Point(Vec<Q>),
    Tag(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawLabel {
    Point(Vec<String>),
    Tag(String),
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Label::Point(p) => RawLabel::Point(p.iter().map(fmt_q).collect()).serialize(s),
            Label::Tag(t) => RawLabel::Tag(t.clone()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawLabel::deserialize(d)? {
            RawLabel::Point(p) => p
                .iter()
                .map(|x| parse_q(x))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Label::Point)
                .map_err(serde::de::Error::custom),
            RawLabel::Tag(t) => Ok(Label::Tag(t)),
        }
    }
}

/// A section of `L^l` given by its leading local Taylor data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TropicalSection {
    pub terms: Vec<MonomialTerm>,
    pub level: u32,
    pub label: Label,
}

impl TropicalSection {
    pub fn new(terms: Vec<MonomialTerm>, level: u32, label: Label) -> Result<Self> {
        if terms.is_empty() {
            return Err(TropicalError::EmptySection);
        }
        if level == 0 {
            return Err(TropicalError::Invalid("level must be positive".into()));
        }
        let len = terms[0].exponent.len();
        let mut seen = BTreeSet::new();
        for t in &terms {
            if t.exponent.len() != len {
                return Err(TropicalError::DimensionMismatch { expected: len, got: t.exponent.len() });
            }
            if !seen.insert((t.exponent.clone(), t.t_order)) {
                return Err(TropicalError::DuplicateTerm(t.exponent.clone(), t.t_order));
            }
        }
        Ok(Self { terms, level, label })
    }

    pub fn exponent_len(&self) -> usize {
        self.terms[0].exponent.len()
    }

    /// Minimum of `⟨x, α⟩ + k` over terms, without checking that `x` is on a face.
    pub fn val_raw(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(x)).fold(f64::INFINITY, f64::min)
    }

    pub fn val_q(&self, x: &[Q]) -> Q {
        self.terms.iter().map(|t| t.value_q(x)).min().expect("sections are non-empty")
    }

    /// Indices of the terms attaining the minimum at an exact point.
    pub fn argmin_q(&self, x: &[Q]) -> Vec<usize> {
        let v = self.val_q(x);
        (0..self.terms.len()).filter(|&i| self.terms[i].value_q(x) == v).collect()
    }
}

/// Tolerance for the on-face check in [`val_at`].
pub const ON_FACE_TOL: f64 = 1e-12;

/// Min-plus valuation of a section at a point of a face.
pub fn val_at(section: &TropicalSection, face: &Face, x: &[f64]) -> Result<f64> {
    if x.len() != section.exponent_len() {
        return Err(TropicalError::DimensionMismatch { expected: section.exponent_len(), got: x.len() });
    }
    if !face.contains_f64(x, ON_FACE_TOL) {
        return Err(TropicalError::PointOffFace(x.to_vec()));
    }
    Ok(section.val_raw(x))
}

/// Exact variant of [`val_at`].
pub fn val_at_q(section: &TropicalSection, face: &Face, x: &[Q]) -> Result<Q> {
    if x.len() != section.exponent_len() {
        return Err(TropicalError::DimensionMismatch { expected: section.exponent_len(), got: x.len() });
    }
    if !face.contains(x) {
        return Err(TropicalError::PointOffFace(x.iter().map(q_to_f64).collect()));
    }
    Ok(section.val_q(x))
}

/// One term of a section-family file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub alpha: Vec<i64>,
    #[serde(default)]
    pub t_order: i64,
    pub coeff: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionSpec {
    #[serde(default)]
    pub level: Option<u32>,
    #[serde(default)]
    pub label: Option<Label>,
    pub terms: Vec<TermSpec>,
}

/// A section-family file: a face, a default level and the sections with inline coefficient vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionFamilySpec {
    #[serde(default = "one")]
    pub level: u32,
    #[serde(default)]
    pub multiplicities: Option<Vec<u32>>,
    #[serde(default)]
    pub face: Option<FaceSpec>,
    pub sections: Vec<SectionSpec>,
}

fn one() -> u32 {
    1
}

/// Parsed section family: sections, the face they live on and the coefficient table.
#[derive(Clone, Debug)]
pub struct SectionFamily {
    pub face: Face,
    pub sections: Vec<TropicalSection>,
    pub coeffs: BTreeMap<usize, Vec<Q>>,
}

impl SectionFamilySpec {
    pub fn build(&self) -> Result<SectionFamily> {
        let first = self
            .sections
            .first()
            .and_then(|s| s.terms.first())
            .ok_or_else(|| TropicalError::Invalid("family has no terms".into()))?;
        let d = first.alpha.len();
        let face = match (&self.face, &self.multiplicities) {
            (Some(f), _) => {
                let verts = f
                    .vertices
                    .iter()
                    .map(|v| v.iter().map(|x| parse_q(x)).collect::<std::result::Result<Vec<_>, _>>())
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Face::new(verts, f.multiplicities.clone(), f.weight.unwrap_or(1.0))?
            }
            (None, Some(b)) => Face::simplex(b)?,
            (None, None) => Face::simplex(&vec![1; d])?,
        };
        let mut coeffs = BTreeMap::new();
        let mut sections = Vec::with_capacity(self.sections.len());
        for (si, s) in self.sections.iter().enumerate() {
            let mut terms = Vec::with_capacity(s.terms.len());
            for t in &s.terms {
                let id = coeffs.len();
                let v = t.coeff.iter().map(|x| parse_q(x)).collect::<std::result::Result<Vec<_>, _>>()?;
                coeffs.insert(id, v);
                terms.push(MonomialTerm::new(t.alpha.clone(), t.t_order, id));
            }
            let label = s.label.clone().unwrap_or_else(|| Label::Tag(format!("s{si}")));
            sections.push(TropicalSection::new(terms, s.level.unwrap_or(self.level), label)?);
        }
        Ok(SectionFamily { face, sections, coeffs })
    }
}

/// Point of a face from barycentric weights, exactly.
pub fn face_point(face: &Face, bary: &[Q]) -> Vec<Q> {
    let d = face.ambient_dim();
    (0..d)
        .map(|c| face.vertices().iter().zip(bary).fold(Q::zero(), |acc, (v, w)| acc + v[c] * w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sec(terms: &[(&[i64], i64)]) -> TropicalSection {
        let terms = terms.iter().enumerate().map(|(i, (a, k))| MonomialTerm::new(a.to_vec(), *k, i)).collect();
        TropicalSection::new(terms, 1, Label::Tag("s".into())).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let face = Face::simplex(&[1, 1]).unwrap();
        let s = sec(&[(&[2, 0], 0), (&[1, 2], 0)]);
        assert_eq!(val_at(&s, &face, &[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(val_at(&s, &face, &[1.0, 0.0]).unwrap(), 1.0);
        let s1 = sec(&[(&[2, 0], 1), (&[1, 2], 0)]);
        assert_eq!(val_at(&s1, &face, &[0.5, 0.5]).unwrap(), 1.5);
        assert!(matches!(val_at(&s, &face, &[0.7, 0.7]), Err(TropicalError::PointOffFace(_))));
    }

    #[test]
    fn duplicate_terms_rejected() {
        let t = vec![MonomialTerm::new(vec![1, 0], 0, 0), MonomialTerm::new(vec![1, 0], 0, 1)];
        assert!(matches!(TropicalSection::new(t, 1, Label::Tag("x".into())), Err(TropicalError::DuplicateTerm(..))));
    }

    #[test]
    fn label_serde() {
        let l = Label::Point(vec![Q::new(1, 2), qi(-1)]);
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"["1/2","-1"]"#);
        assert_eq!(serde_json::from_str::<Label>(&s).unwrap(), l);
        assert_eq!(serde_json::from_str::<Label>(r#""theta""#).unwrap(), Label::Tag("theta".into()));
    }
}
