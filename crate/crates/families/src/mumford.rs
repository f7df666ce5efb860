//! Mumford abelian families: theta bases and the self-mirror torus problem.

use std::sync::Arc;

use nacy_cost::{abelian_cost, mumford_theta_family, MumfordData, ThetaFamily};
use nacy_polyhedral::{rational_points, DiscreteMeasure};
use nacy_transport::TransportProblem;

use crate::error::{FamilyError, Result};
use crate::spec::Discretization;

/// Theta basis at `levels` and the abelian cost problem with uniform grids on both tori.
pub fn mumford_family(data: &MumfordData, levels: &[u32], disc: &Discretization) -> Result<(ThetaFamily, TransportProblem)> {
    let data = MumfordData::new(data.factors.clone())?;
    if levels.is_empty() {
        return Err(FamilyError::InvariantViolation("at least one theta level is required".into()));
    }
    let family = mumford_theta_family(&data, levels)?;
    let cost = abelian_cost(&data)?;
    let mu0 = DiscreteMeasure::uniform(rational_points(&cost.source, disc.source_level))?;
    let nu0 = DiscreteMeasure::uniform(rational_points(&cost.target, disc.target_level))?;
    let problem = TransportProblem::new(cost, Arc::new(mu0), Arc::new(nu0), None, data.ln_norm())?;
    Ok((family, problem))
}
