//! Cost functions `c(x, p)` between a skeleton and a base complex: the bilinear pairing, Fekete
//! limits of theta valuations and the closed-form abelian theta cost, with sampled bound checks.

pub mod bounds;
pub mod error;
pub mod function;
pub mod mumford;
pub mod pairing;
pub mod theta;

pub use bounds::{verify_cost_bounds, BoundKind, BoundReport, BoundViolation, CostSample};
pub use error::{CostError, Result};
pub use function::{
    tabulated_cost, zero_cost, CostFunction, CostKernel, PairingKernel, Provenance, Swapped, TabulatedKernel,
    ZeroKernel,
};
pub use mumford::{
    abelian_cost, abelian_minimizers, abelian_raw, abelian_theta_cost, abelian_theta_cost_with_radius,
    mumford_theta_family, theta_labels, theta_section, AbelianKernel, MumfordData, PeriodicPl,
};
pub use pairing::pairing_cost;
pub use theta::{fekete_cost, fekete_cost_estimate, FeketeEstimate, FeketeKernel, ThetaFamily, ThetaFamilySpec};
