//! Tropical (min-plus) data of sections on faces of a dual complex: valuations, dominant
//! regions, exponent classes, the valuative-independence check and series row reduction.

pub mod error;
pub mod independence;
pub mod lipschitz;
pub mod regions;
pub mod section;
pub mod series;

pub use error::{Result, TropicalError};
pub use independence::{
    check_at_point, check_valuative_independence, class_key, exponent_classes, kernel_vector, DependenceWitness,
    Verdict,
};
pub use lipschitz::lipschitz_bound;
pub use regions::{dominant_regions, Region, RegionDecomposition};
pub use section::{
    face_point, val_at, val_at_q, Label, MonomialTerm, SectionFamily, SectionFamilySpec, SectionSpec, TermSpec,
    TropicalSection,
};
pub use series::{
    constant_term_det, series_row_reduce, RowReduceOptions, RowReduction, Series, SeriesEntrySpec, SeriesMatrix,
};
