//! Serializable family blocks, discretizations and the problem-file round trip.

use std::sync::Arc;

use nacy_cost::{zero_cost, MumfordData, PeriodicPl, ThetaFamily};
use nacy_polyhedral::{qi, rational_points, segment_complex, ComplexSpec, DiscreteMeasure, Q};
use nacy_transport::TransportProblem;
use serde::{Deserialize, Serialize};

use crate::error::{FamilyError, Result};
use crate::intermediate::{intermediate_family, intermediate_theta_family, projective_hilbert, IntermediateData};
use crate::mumford::mumford_family;
use crate::toric::{toric_pair, toric_problem, ReflexivePolytopePair};

/// Grid levels: source points in `(1/source_level) Z`, target points in `(1/target_level) Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    pub source_level: u32,
    pub target_level: u32,
}

impl Discretization {
    pub fn new(source_level: u32, target_level: u32) -> Result<Self> {
        if source_level == 0 || target_level == 0 {
            return Err(FamilyError::InvariantViolation("grid levels must be positive".into()));
        }
        Ok(Self { source_level, target_level })
    }

    pub fn source_h(&self) -> Q {
        Q::new(1, i64::from(self.source_level.max(1)))
    }

    pub fn target_h(&self) -> Q {
        Q::new(1, i64::from(self.target_level.max(1)))
    }
}

/// Ambient Hilbert series, given explicitly or as projective space up to a depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HilbertSpec {
    Coefficients(Vec<u64>),
    Projective { projective: u32, depth: usize },
}

impl HilbertSpec {
    pub fn coefficients(&self) -> Vec<u64> {
        match self {
            HilbertSpec::Coefficients(c) => c.clone(),
            HilbertSpec::Projective { projective, depth } => projective_hilbert(*projective, *depth),
        }
    }
}

fn default_levels() -> Vec<u32> {
    vec![1, 2, 3]
}

fn triangular_factors() -> Vec<PeriodicPl> {
    vec![PeriodicPl::triangular()]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Toric {
        vertices: Vec<Vec<i64>>,
        /// Defaults to the normalized boundary volume.
        #[serde(default)]
        ln_norm: Option<f64>,
    },
    Intermediate { n: u32, m: u32, d: Vec<u32>, hilbert_m: HilbertSpec, ln_norm: f64 },
    Abelian {
        #[serde(default = "triangular_factors")]
        factors: Vec<PeriodicPl>,
        #[serde(default = "default_levels")]
        levels: Vec<u32>,
    },
    /// Zero cost on `[0, 1]`, both sides; a smoke instance.
    Zero {},
}

/// A generated problem with whatever family data it came from.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: FamilySpec,
    pub discretization: Discretization,
    pub problem: TransportProblem,
    pub theta: Option<ThetaFamily>,
    pub pair: Option<ReflexivePolytopePair>,
    pub intermediate: Option<IntermediateData>,
}

impl FamilySpec {
    pub fn intermediate_data(&self) -> Option<IntermediateData> {
        match self {
            FamilySpec::Intermediate { n, m, d, hilbert_m, ln_norm } => Some(IntermediateData {
                n: *n,
                m: *m,
                d: d.clone(),
                hilbert_m: hilbert_m.coefficients(),
                ln_norm: *ln_norm,
            }),
            _ => None,
        }
    }

    pub fn mumford_data(&self) -> Option<Result<MumfordData>> {
        match self {
            FamilySpec::Abelian { factors, .. } => Some(MumfordData::new(factors.clone()).map_err(Into::into)),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Toric { .. } => "toric",
            FamilySpec::Intermediate { .. } => "intermediate",
            FamilySpec::Abelian { .. } => "abelian",
            FamilySpec::Zero {} => "zero",
        }
    }

    pub fn build(&self, disc: &Discretization) -> Result<Instance> {
        let disc = Discretization::new(disc.source_level, disc.target_level)?;
        let mut out = Instance {
            spec: self.clone(),
            discretization: disc,
            problem: zero_problem(&disc)?,
            theta: None,
            pair: None,
            intermediate: None,
        };
        match self {
            FamilySpec::Toric { vertices, ln_norm } => {
                let pair = toric_pair(vertices)?;
                out.problem = toric_problem(&pair, &disc, *ln_norm)?;
                out.pair = Some(pair);
            }
            FamilySpec::Intermediate { .. } => {
                let data = self.intermediate_data().expect("intermediate block");
                out.problem = intermediate_family(&data, &disc)?;
                let top = (data.hilbert_m.len() as u32).saturating_sub(1).min(3);
                let levels: Vec<u32> = (1..=top).collect();
                out.theta = Some(intermediate_theta_family(&data, &levels)?);
                out.intermediate = Some(data);
            }
            FamilySpec::Abelian { levels, .. } => {
                let data = self.mumford_data().expect("abelian block")?;
                let (theta, problem) = mumford_family(&data, levels, &disc)?;
                out.problem = problem;
                out.theta = Some(theta);
            }
            FamilySpec::Zero {} => {}
        }
        Ok(out)
    }
}

fn zero_problem(disc: &Discretization) -> Result<TransportProblem> {
    let c = Arc::new(segment_complex(qi(0), qi(1), false)?);
    let mu0 = DiscreteMeasure::uniform(rational_points(&c, disc.source_level))?;
    let nu0 = DiscreteMeasure::uniform(rational_points(&c, disc.target_level))?;
    Ok(TransportProblem::new(zero_cost(c.clone(), c), Arc::new(mu0), Arc::new(nu0), None, 1.0)?)
}

/// Everything needed to reproduce a problem: the family block, the grids it was discretized on,
/// and the resulting complexes and measures. The cost is regenerated from the family block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub family: FamilySpec,
    pub discretization: Discretization,
    pub cost: String,
    pub source: ComplexSpec,
    pub target: ComplexSpec,
    pub mu0: DiscreteMeasure,
    pub nu0: DiscreteMeasure,
    pub weight: Vec<f64>,
    pub ln_norm: f64,
}

impl ProblemFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let p = &inst.problem;
        Self {
            family: inst.spec.clone(),
            discretization: inst.discretization,
            cost: p.cost.kernel.name().to_string(),
            source: p.cost.source.to_spec(),
            target: p.cost.target.to_spec(),
            mu0: (*p.mu0).clone(),
            nu0: (*p.nu0).clone(),
            weight: p.weight.clone(),
            ln_norm: p.ln_norm,
        }
    }

    /// Regenerates the instance and checks that it reproduces the stored grids exactly.
    pub fn rebuild(&self) -> Result<Instance> {
        let inst = self.family.build(&self.discretization)?;
        if ProblemFile::from_instance(&inst) != *self {
            return Err(FamilyError::InvariantViolation("problem file does not match its family block".into()));
        }
        Ok(inst)
    }
}
