//! Checks run on solved transport problems and on abelian theta data.

pub mod duality;
pub mod error;
pub mod hybrid;
pub mod ma;
pub mod pushforward;

pub use duality::{duality_check, DualityReport};
pub use error::{DiagnosticsError, Result};
pub use hybrid::{hybrid_potential, hybrid_potential_curve, HybridConfig, HybridCurve, HybridValue, TAIL_TOL};
pub use ma::{ma_residual, ma_residual_1d, ma_residual_2d, MaCell, MaResidual};
pub use pushforward::{pushforward_residual, PushforwardResidual, PushforwardSource};
