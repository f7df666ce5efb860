//! Discrete Kontorovich duality on polyhedral grids.
//!
//! Sign convention: `F(φ) = ∫ φ dμ₀ + ∫ W φ^c dν₀` with `φ^c(p) = max_x c(x, p) − φ(x)` is minimized
//! over `P_c`; its minimum equals the maximal correlation `max_π ∫ c dπ` over plans with marginals
//! `(μ₀, W ν₀)`.

pub mod energy;
pub mod error;
pub mod minimize;
pub mod plan;
pub mod problem;
pub mod simplex;
pub mod ssp;

pub use energy::{level_transform, relative_volume_sum, RelativeVolume};
pub use error::{Result, TransportError};
pub use minimize::{minimize_kontorovich, Method, SolverConfig, TransportResult};
pub use plan::{canonical_duals, greedy_plan, normalize, Plan, SUPPORT_TOL};
pub use problem::{
    c_transform, c_transform_values, kontorovich_value, ma_energy, project_pc, CTransform, Direction, PotentialField,
    TransportProblem, MASS_TOL,
};
pub use simplex::{lp_oracle, LpConfig, LpSolution, DEFAULT_SIZE_CAP};
pub use ssp::{solve_ssp, SspOutcome};
