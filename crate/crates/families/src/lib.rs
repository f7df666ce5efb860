//! The worked example families as ready transport problems: toric pairs of reflexive polytopes,
//! intermediate complex-structure limits with weighted targets, and Mumford abelian families.

pub mod asymptote;
pub mod error;
pub mod hull;
pub mod intermediate;
pub mod mumford;
pub mod spec;
pub mod toric;

pub use asymptote::{lattice_count_asymptote, weighted_count, LatticeCount};
pub use error::{FamilyError, Result};
pub use intermediate::{
    base_complex, intermediate_family, intermediate_theta_family, p3_two_quadrics, projective_hilbert,
    section_count, skeleton_complex, IntermediateData, SectionCount,
};
pub use mumford::mumford_family;
pub use spec::{Discretization, FamilySpec, HilbertSpec, Instance, ProblemFile};
pub use toric::{boundary_complex, polar_dual, toric_pair, toric_problem, ReflexivePolytopePair};
