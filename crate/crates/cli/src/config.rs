//! Strict JSON experiment configurations.

use std::path::{Path, PathBuf};

use nacy_diagnostics::{HybridConfig, PushforwardSource};
use nacy_families::{Discretization, FamilySpec};
use nacy_transport::{SolverConfig, DEFAULT_SIZE_CAP};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

fn default_name() -> String {
    "run".into()
}

fn default_grid_cap() -> usize {
    250_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub seed: u64,
    pub family: FamilySpec,
    pub discretization: Discretization,
    /// Largest admissible `n_source · n_target`.
    #[serde(default = "default_grid_cap")]
    pub grid_cap: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub enabled: bool,
    pub size_cap: usize,
    /// Relative tolerance on `|value − LP value| / (1 + |LP value|)`.
    pub value_tol: f64,
    /// Sup-norm tolerance on the potentials after aligning constants.
    pub potential_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { enabled: true, size_cap: DEFAULT_SIZE_CAP, value_tol: 1e-6, potential_tol: 1e-4 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub pushforward: Option<PushforwardCheck>,
    pub ma: Option<MaCheck>,
    pub duality: Option<DualityCheck>,
    pub cost_bounds: Option<CostBoundsCheck>,
    pub independence: Option<IndependenceCheck>,
    pub energy: Option<EnergyCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushforwardCheck {
    pub source: PushforwardSource,
    pub max_linf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaCheck {
    #[serde(default)]
    pub face: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualityCheck {
    pub functional_tol: f64,
    pub potential_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostBoundsCheck {
    pub samples: usize,
    /// Sample levels are drawn from `1..=max_level`.
    pub max_level: u32,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndependenceCheck {
    pub levels: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyCheck {
    pub levels: Vec<u32>,
    /// Constant `a` in the shift check `E(φ + a) − E(φ) = (Lⁿ) a`.
    pub shift: f64,
    /// Relative tolerance of the shift check at the largest level.
    pub shift_rel_tol: f64,
}

/// `nacy hybrid` configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridRunConfig {
    #[serde(default)]
    pub seed: u64,
    pub family: FamilySpec,
    pub levels: Vec<u32>,
    pub t_schedule: Vec<f64>,
    #[serde(default = "default_window")]
    pub window: usize,
    /// Skeleton grid points per axis.
    pub grid: usize,
    pub output_dir: PathBuf,
}

fn default_window() -> usize {
    8
}

impl HybridRunConfig {
    pub fn hybrid_config(&self, level: u32) -> HybridConfig {
        HybridConfig { level, t_schedule: self.t_schedule.clone(), window: self.window, constants: None }
    }
}

/// `nacy count-sections` configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountConfig {
    #[serde(default)]
    pub seed: u64,
    pub family: FamilySpec,
    pub max_level: u32,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        positive("solver.tol", self.solver.tol)?;
        if !(self.solver.damping > 0.0 && self.solver.damping <= 1.0) {
            return Err(CliError::Config(format!("solver.damping must lie in (0, 1], got {}", self.solver.damping)));
        }
        if self.solver.max_iter == 0 {
            return Err(CliError::Config("solver.max_iter must be positive".into()));
        }
        Discretization::new(self.discretization.source_level, self.discretization.target_level)
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.grid_cap == 0 {
            return Err(CliError::Config("grid_cap must be positive".into()));
        }
        if self.oracle.enabled {
            positive("oracle.value_tol", self.oracle.value_tol)?;
            positive("oracle.potential_tol", self.oracle.potential_tol)?;
        }
        let d = &self.diagnostics;
        if let Some(c) = &d.pushforward {
            positive("pushforward.max_linf", c.max_linf)?;
        }
        if let Some(c) = &d.ma {
            positive("ma.max_residual", c.max_residual)?;
        }
        if let Some(c) = &d.duality {
            positive("duality.functional_tol", c.functional_tol)?;
            positive("duality.potential_tol", c.potential_tol)?;
        }
        if let Some(c) = &d.cost_bounds {
            positive("cost_bounds.tol", c.tol)?;
            if c.samples == 0 || c.max_level == 0 {
                return Err(CliError::Config("cost_bounds needs samples and a positive max_level".into()));
            }
        }
        if let Some(c) = &d.energy {
            positive("energy.shift_rel_tol", c.shift_rel_tol)?;
            if c.levels.is_empty() || c.levels.contains(&0) {
                return Err(CliError::Config("energy.levels must be positive and non-empty".into()));
            }
        }
        let theta = matches!(self.family, FamilySpec::Abelian { .. });
        if (d.cost_bounds.is_some() || d.independence.is_some() || d.energy.is_some()) && !theta {
            return Err(CliError::Config("cost_bounds, independence and energy checks need an abelian family".into()));
        }
        Ok(())
    }
}

impl HybridRunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !matches!(self.family, FamilySpec::Abelian { .. }) {
            return Err(CliError::Config("hybrid runs need an abelian family".into()));
        }
        if self.levels.is_empty() || self.levels.contains(&0) || self.grid == 0 {
            return Err(CliError::Config("levels and grid must be positive".into()));
        }
        if self.t_schedule.iter().any(|&t| !(t > 0.0 && t < 1.0)) || self.t_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::Config("t_schedule must decrease strictly inside (0, 1)".into()));
        }
        Ok(())
    }
}

impl CountConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !matches!(self.family, FamilySpec::Intermediate { .. }) {
            return Err(CliError::Config("count-sections needs an intermediate family".into()));
        }
        Ok(())
    }
}

/// Reads and strictly parses a JSON file; every failure is a configuration error.
pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> ExperimentConfig {
        serde_json::from_str(
            r#"{"seed":0,"family":{"family":"zero"},"discretization":{"source_level":2,"target_level":2},"output_dir":"out"}"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = zero();
        assert_eq!(c.name, "run");
        assert_eq!(c.grid_cap, 250_000);
        assert!(c.oracle.enabled);
        c.validate().unwrap();
    }

    #[test]
    fn tolerances_must_be_positive() {
        let mut c = zero();
        c.oracle.value_tol = 0.0;
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let mut c = zero();
        c.diagnostics.duality = Some(DualityCheck { functional_tol: 1e-9, potential_tol: f64::NAN });
        assert!(c.validate().is_err());
        let mut c = zero();
        c.diagnostics.energy = Some(EnergyCheck { levels: vec![4], shift: 1.0, shift_rel_tol: 0.05 });
        assert!(c.validate().is_err(), "energy needs an abelian family");
    }

    #[test]
    fn hybrid_schedule_must_decrease() {
        let mut h: HybridRunConfig = serde_json::from_str(
            r#"{"family":{"family":"abelian"},"levels":[1],"t_schedule":[1e-2,1e-4],"grid":4,"output_dir":"h"}"#,
        )
        .unwrap();
        h.validate().unwrap();
        h.t_schedule = vec![1e-4, 1e-2];
        assert!(h.validate().is_err());
    }
}
