//! Seeded sample generation for the sampling-based checks.

use nacy_cost::{mumford_theta_family, CostSample, MumfordData, ThetaFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{runtime, CliResult};

/// Theta family with every level a sample or a sample sum can reach.
pub fn bounds_family(data: &MumfordData, max_level: u32) -> CliResult<ThetaFamily> {
    let levels: Vec<u32> = (1..=2 * max_level).collect();
    mumford_theta_family(data, &levels).map_err(runtime)
}

/// `count` triples `(x, p, l)` with `l ∈ 1..=max_level`, `p` a random level-`l` label, `x` uniform
/// on the fundamental domain of the source torus; each carries a random partner `(p′, l′)`.
pub fn cost_samples(
    family: &ThetaFamily,
    data: &MumfordData,
    count: usize,
    max_level: u32,
    seed: u64,
) -> CliResult<Vec<CostSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let periods = data.source_periods();
    let pick = |rng: &mut ChaCha8Rng| -> CliResult<(Vec<nacy_polyhedral::Q>, u32)> {
        let l = rng.gen_range(1..=max_level);
        let n = family.sections(l).map_err(runtime)?.len();
        let p = family.label(l, rng.gen_range(0..n)).map_err(runtime)?.to_vec();
        Ok((p, l))
    };
    (0..count)
        .map(|_| {
            let x = periods.iter().map(|&a| rng.gen_range(0.0..a as f64)).collect();
            let (p, level) = pick(&mut rng)?;
            let partner = Some(pick(&mut rng)?);
            Ok(CostSample { x, p, level, partner })
        })
        .collect()
}
