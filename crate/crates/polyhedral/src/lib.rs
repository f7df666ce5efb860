//! Integral polyhedral complexes with exact rational vertices, their rational point
//! lattices, Lebesgue face measures and lumped quadrature.

pub mod complex;
pub mod error;
pub mod face;
pub mod measure;
pub mod rational;

pub use complex::{
    build_complex, grid_torus_complex, segment_complex, torus_complex, ComplexSpec, FaceSpec, Gluing, GluingSpec,
    IntegralPolyhedralComplex,
};
pub use error::{PolyError, Result};
pub use face::{face_measure, Face, FaceMeasure, MeasureChart};
pub use measure::{
    continuous_mass, pairwise_sum, quadrature, rational_points, DiscreteMeasure, MeasureWeights, TaggedPoint,
};
pub use rational::{fmt_q, parse_q, q_to_f64, qi, Q};
