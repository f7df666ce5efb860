//! The `solve` pipeline: family → discretization → solve → oracle cross-check → diagnostics.

use std::path::{Path, PathBuf};

use nacy_cost::{mumford_theta_family, verify_cost_bounds, MumfordData};
use nacy_diagnostics::{duality_check, ma_residual, pushforward_residual};
use nacy_families::{FamilySpec, Instance, ProblemFile};
use nacy_transport::{
    c_transform_values, lp_oracle, ma_energy, minimize_kontorovich, relative_volume_sum, Direction, LpConfig, Method,
    PotentialField, TransportProblem, TransportResult,
};
use nacy_tropical::check_valuative_independence;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{EnergyCheck, ExperimentConfig};
use crate::error::{runtime, CliError, CliResult};
use crate::output::{csv_writer, finish, write_grid_csv, write_json, AssertionRow, DiagnosticsFile};
use crate::sampling::{bounds_family, cost_samples};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSummary {
    pub primal_value: f64,
    /// `|value − LP value| / (1 + |LP value|)`.
    pub value_gap: f64,
    /// Sup-norm distance of the source potentials after the best constant shift.
    pub potential_gap: f64,
    pub pivots: usize,
}

/// `result.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultFile {
    pub name: String,
    pub seed: u64,
    pub family: &'static str,
    pub method: Method,
    pub n_source: usize,
    pub n_target: usize,
    pub value: f64,
    pub energy: f64,
    /// Primal-dual gap of the returned plan.
    pub gap: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub lp: Option<LpSummary>,
    /// Why the oracle did not run, when enabled but skipped.
    pub lp_skipped: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub result: ResultFile,
    pub diagnostics: DiagnosticsFile,
}

/// `min_a sup |a − b − a|`: half the range of the difference.
pub(crate) fn aligned_sup_gap(a: &[f64], b: &[f64]) -> f64 {
    let (lo, hi) = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
    if lo > hi {
        0.0
    } else {
        0.5 * (hi - lo)
    }
}

pub fn build_instance(config: &ExperimentConfig) -> CliResult<Instance> {
    let inst = config.family.build(&config.discretization).map_err(|e| CliError::Config(e.to_string()))?;
    let pairs = inst.problem.n_source() * inst.problem.n_target();
    if pairs > config.grid_cap {
        return Err(CliError::Config(format!("grid has {pairs} pairs, above grid_cap {}", config.grid_cap)));
    }
    Ok(inst)
}

fn mumford(spec: &FamilySpec) -> CliResult<MumfordData> {
    spec.mumford_data()
        .ok_or_else(|| CliError::Config("check needs an abelian family".into()))?
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Runs the pipeline and writes every artifact into `config.output_dir`.
pub fn solve(config: &ExperimentConfig, allow_nonconverged: bool) -> CliResult<RunOutcome> {
    config.validate()?;
    let inst = build_instance(config)?;
    let problem = &inst.problem;
    let res = minimize_kontorovich(problem, &config.solver).map_err(runtime)?;
    let energy = ma_energy(problem, &res.phi).map_err(runtime)?;

    let mut rows = Vec::new();
    let mut details = Map::new();

    let mut lp = None;
    let mut lp_skipped = None;
    if config.oracle.enabled {
        let cap = config.oracle.size_cap;
        if problem.n_source() > cap || problem.n_target() > cap {
            lp_skipped = Some(format!("grid {}x{} exceeds size_cap {cap}", problem.n_source(), problem.n_target()));
        } else {
            let sol = lp_oracle(problem, LpConfig { size_cap: cap }).map_err(runtime)?;
            let summary = LpSummary {
                primal_value: sol.primal_value,
                value_gap: (res.value - sol.primal_value).abs() / (1.0 + sol.primal_value.abs()),
                potential_gap: aligned_sup_gap(&res.phi.values, &sol.phi),
                pivots: sol.pivots,
            };
            rows.push(AssertionRow::at_most("lp_value", summary.value_gap, config.oracle.value_tol));
            rows.push(AssertionRow::at_most("lp_potential", summary.potential_gap, config.oracle.potential_tol));
            lp = Some(summary);
        }
    }

    let d = &config.diagnostics;
    if let Some(c) = &d.pushforward {
        let r = pushforward_residual(&res, problem, c.source).map_err(runtime)?;
        rows.push(AssertionRow::at_most("pushforward_linf", r.linf, c.max_linf));
        details.insert("pushforward".into(), json!(r));
    }
    if let Some(c) = &d.ma {
        let r = ma_residual(&res.phi, &problem.cost.source, c.face, config.discretization.source_h()).map_err(runtime)?;
        rows.push(AssertionRow::at_most("ma_residual", r.max_residual, c.max_residual));
        details.insert(
            "ma".into(),
            json!({
                "face": c.face,
                "cells": r.cells.len(),
                "total_mass": r.total_mass,
                "max_residual": r.max_residual,
                "degenerate_count": r.degenerate_count,
            }),
        );
    }
    if let Some(c) = &d.duality {
        let dual = problem.dual().map_err(runtime)?;
        let dres = minimize_kontorovich(&dual, &config.solver).map_err(runtime)?;
        let r = duality_check(problem, &dual, &res, &dres).map_err(runtime)?;
        rows.push(AssertionRow::at_most("duality_functional", r.functional_gap, c.functional_tol));
        rows.push(AssertionRow::at_most("duality_potential", r.potential_gap, c.potential_tol));
        details.insert("duality".into(), json!(r));
    }
    if let Some(c) = &d.cost_bounds {
        let data = mumford(&config.family)?;
        let fam = bounds_family(&data, c.max_level)?;
        let samples = cost_samples(&fam, &data, c.samples, c.max_level, config.seed)?;
        let r = verify_cost_bounds(&fam, &problem.cost, &samples, c.tol).map_err(runtime)?;
        rows.push(AssertionRow::at_most("cost_bound_violations", r.violations.len() as f64, 0.0));
        details.insert("cost_bounds".into(), json!(r));
    }
    if let Some(c) = &d.independence {
        let data = mumford(&config.family)?;
        let fam = mumford_theta_family(&data, &c.levels).map_err(runtime)?;
        let mut verdicts = Map::new();
        for &l in &c.levels {
            let sections = fam.sections(l).map_err(runtime)?;
            let mut per_cell = Vec::new();
            for cell in problem.cost.source.cells() {
                per_cell.push(check_valuative_independence(sections, cell, fam.coeffs()).map_err(runtime)?);
            }
            rows.push(AssertionRow::holds(format!("independence_l{l}"), per_cell.iter().all(|v| v.is_independent())));
            verdicts.insert(l.to_string(), json!(per_cell));
        }
        details.insert("independence".into(), Value::Object(verdicts));
    }
    if let Some(c) = &d.energy {
        let data = mumford(&config.family)?;
        let (r, detail) = energy_check(problem, &res, &data, c)?;
        rows.extend(r);
        details.insert("energy".into(), detail);
    }

    let result = ResultFile {
        name: config.name.clone(),
        seed: config.seed,
        family: config.family.name(),
        method: res.method,
        n_source: problem.n_source(),
        n_target: problem.n_target(),
        value: res.value,
        energy,
        gap: res.gap,
        iterations: res.iterations,
        converged: res.converged,
        lp,
        lp_skipped,
    };
    let diagnostics = DiagnosticsFile { seed: config.seed, assertions: rows, details };
    write_run(&config.output_dir, config, &inst, &res, &result, &diagnostics)?;

    if !res.converged && !allow_nonconverged {
        return Err(CliError::NotConverged { iterations: res.iterations, gap: res.gap });
    }
    let failed = diagnostics.failed();
    if failed > 0 {
        return Err(CliError::AssertionFailed { failed, total: diagnostics.assertions.len() });
    }
    Ok(RunOutcome { dir: config.output_dir.clone(), result, diagnostics })
}

/// Relative-volume sums of `(φ, 0)` against `E(φ) − E(0)` over the configured levels, and the
/// constant-shift check at the largest level.
fn energy_check(
    problem: &TransportProblem,
    res: &TransportResult,
    data: &MumfordData,
    c: &EnergyCheck,
) -> CliResult<(Vec<AssertionRow>, Value)> {
    let fam = mumford_theta_family(data, &c.levels).map_err(runtime)?;
    let phi = &res.phi;
    let zero = PotentialField::on_source(problem, vec![0.0; problem.n_source()]).map_err(runtime)?;
    let de = ma_energy(problem, phi).map_err(runtime)? - ma_energy(problem, &zero).map_err(runtime)?;
    let mut errors = Vec::with_capacity(c.levels.len());
    let mut scaled = Vec::with_capacity(c.levels.len());
    for &l in &c.levels {
        let r = relative_volume_sum(phi, &zero, &fam, l).map_err(runtime)?;
        scaled.push(r.scaled);
        errors.push((r.scaled - de).abs());
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let top = *c.levels.iter().max().expect("validated non-empty");
    let shift = relative_volume_sum(&phi.shifted(c.shift), phi, &fam, top).map_err(runtime)?.scaled;
    let expected = problem.ln_norm * c.shift;
    let rows = vec![
        AssertionRow::holds("energy_errors_decrease", decreasing),
        AssertionRow::within("energy_shift", expected, shift, c.shift_rel_tol * expected.abs()),
    ];
    let detail = json!({
        "levels": c.levels,
        "energy_difference": de,
        "scaled": scaled,
        "errors": errors,
        "shift_level": top,
        "shift_scaled": shift,
    });
    Ok((rows, detail))
}

fn write_run(
    dir: &Path,
    config: &ExperimentConfig,
    inst: &Instance,
    res: &TransportResult,
    result: &ResultFile,
    diagnostics: &DiagnosticsFile,
) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
    let problem = &inst.problem;
    write_json(&dir.join("config.json"), config)?;
    write_json(&dir.join("problem.json"), &ProblemFile::from_instance(inst))?;
    write_json(&dir.join("result.json"), result)?;
    write_grid_csv(&dir.join("phi.csv"), &problem.mu0, "x", &[("phi", &res.phi.values)])?;
    let (phic, _) = c_transform_values(problem, &res.phi.values, Direction::SourceToTarget);
    write_grid_csv(&dir.join("phic.csv"), &problem.nu0, "p", &[("weight", &problem.weight), ("phic", &phic)])?;
    let plan_path = dir.join("plan.csv");
    if let Some(plan) = &res.plan {
        let mut w = csv_writer(&plan_path)?;
        w.write_record(["source", "target", "mass"]).map_err(runtime)?;
        for &(i, j, m) in &plan.entries {
            w.write_record([i.to_string(), j.to_string(), m.to_string()]).map_err(runtime)?;
        }
        finish(w)?;
    } else if plan_path.exists() {
        std::fs::remove_file(&plan_path).map_err(runtime)?;
    }
    write_json(&dir.join("diagnostics.json"), diagnostics)
}
