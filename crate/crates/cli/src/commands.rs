//! Subcommands other than `solve`.

use std::path::Path;

use nacy_cost::MumfordData;
use nacy_diagnostics::{duality_check, hybrid_potential, hybrid_potential_curve, ma_residual};
use nacy_families::{section_count, FamilyError, ProblemFile};
use nacy_polyhedral::{fmt_q, Q};
use nacy_transport::{c_transform_values, minimize_kontorovich, Direction, PotentialField};
use nacy_tropical::{check_valuative_independence, SectionFamilySpec, Verdict};
use serde::Serialize;
use serde_json::json;

use crate::config::{load, CountConfig, ExperimentConfig, HybridRunConfig};
use crate::error::{runtime, CliError, CliResult};
use crate::output::{csv_writer, finish, read_diagnostics, read_value_column, render_report, write_json, AssertionRow, ReportFormat};

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub section_count: usize,
    pub face_dim: usize,
    #[serde(flatten)]
    pub verdict: Verdict,
}

pub fn check_independence(path: &Path) -> CliResult<IndependenceReport> {
    let spec: SectionFamilySpec = load(path)?;
    let fam = spec.build().map_err(|e| CliError::Config(e.to_string()))?;
    let verdict = check_valuative_independence(&fam.sections, &fam.face, &fam.coeffs).map_err(runtime)?;
    Ok(IndependenceReport { section_count: fam.sections.len(), face_dim: fam.face.dim(), verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub level: u32,
    pub enumerated: u64,
    pub series: u64,
    pub agree: bool,
}

/// Section counts for `l = 0..=max_level`; writes `sections.csv`/`sections.json` when an output
/// directory is configured. Disagreements are assertion failures.
pub fn count_sections(config: &CountConfig) -> CliResult<Vec<CountRow>> {
    config.validate()?;
    let data = config.family.intermediate_data().expect("validated intermediate block");
    let mut rows = Vec::new();
    for l in 0..=config.max_level {
        let c = section_count(&data, l).map_err(|e| match e {
            FamilyError::SeriesDepthExceeded { .. } | FamilyError::InvariantViolation(_) => CliError::Config(e.to_string()),
            other => runtime(other),
        })?;
        rows.push(CountRow { level: l, enumerated: c.enumerated, series: c.series, agree: c.enumerated == c.series });
    }
    if let Some(dir) = &config.output_dir {
        std::fs::create_dir_all(dir).map_err(runtime)?;
        let mut w = csv_writer(&dir.join("sections.csv"))?;
        for r in &rows {
            w.serialize(r).map_err(runtime)?;
        }
        finish(w)?;
        write_json(&dir.join("sections.json"), &json!({ "seed": config.seed, "rows": rows }))?;
    }
    let failed = rows.iter().filter(|r| !r.agree).count();
    if failed > 0 {
        return Err(CliError::AssertionFailed { failed, total: rows.len() });
    }
    Ok(rows)
}

/// Skeleton grid `k/grid · a_i` on the fundamental domain of the source torus.
fn torus_grid(data: &MumfordData, grid: usize) -> Vec<Vec<f64>> {
    let periods = data.source_periods();
    let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
    for &a in &periods {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..grid).map(move |k| {
                    let mut q = p.clone();
                    q.push(k as f64 / grid as f64 * a as f64);
                    q
                })
            })
            .collect();
    }
    pts
}

/// Writes `hybrid.csv` (level, t, error), `hybrid_points.csv` (level, x.., value, na, residual at the
/// smallest t) and `hybrid.json`. Errors that fail to decrease strictly are assertion failures.
pub fn hybrid(config: &HybridRunConfig) -> CliResult<Vec<AssertionRow>> {
    config.validate()?;
    let data = config
        .family
        .mumford_data()
        .expect("validated abelian block")
        .map_err(|e| CliError::Config(e.to_string()))?;
    let grid = torus_grid(&data, config.grid);
    let dim = data.rank();
    std::fs::create_dir_all(&config.output_dir).map_err(runtime)?;

    let mut curves = Vec::new();
    let mut rows = Vec::new();
    let mut errs = csv_writer(&config.output_dir.join("hybrid.csv"))?;
    errs.write_record(["level", "t", "error"]).map_err(runtime)?;
    let mut points = csv_writer(&config.output_dir.join("hybrid_points.csv"))?;
    let mut header = vec!["level".to_string()];
    header.extend((0..dim).map(|k| format!("x{k}")));
    header.extend(["value", "na", "residual"].map(String::from));
    points.write_record(&header).map_err(runtime)?;

    for &level in &config.levels {
        let cfg = config.hybrid_config(level);
        let curve = hybrid_potential_curve(&data, &cfg, &grid).map_err(runtime)?;
        for (t, e) in curve.t.iter().zip(&curve.errors) {
            errs.write_record([level.to_string(), t.to_string(), e.to_string()]).map_err(runtime)?;
        }
        let t_min = *cfg.t_schedule.last().expect("validated non-empty");
        for x in &grid {
            let v = hybrid_potential(&data, &cfg, t_min, x).map_err(runtime)?;
            let mut rec = vec![level.to_string()];
            rec.extend(x.iter().map(f64::to_string));
            rec.extend([v.finite, v.na, v.finite - v.na].map(|f| f.to_string()));
            points.write_record(&rec).map_err(runtime)?;
        }
        let decreasing = curve.errors.windows(2).all(|w| w[1] < w[0]);
        rows.push(AssertionRow::holds(format!("hybrid_decreasing_l{level}"), decreasing));
        curves.push(curve);
    }
    finish(errs)?;
    finish(points)?;
    write_json(
        &config.output_dir.join("hybrid.json"),
        &json!({ "seed": config.seed, "grid_points": grid.len(), "curves": curves, "assertions": rows }),
    )?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::AssertionFailed { failed, total: rows.len() });
    }
    Ok(rows)
}

fn run_config(run_dir: &Path) -> CliResult<ExperimentConfig> {
    let path = run_dir.join("config.json");
    if !path.exists() {
        return Err(CliError::IncompleteRun(format!("{} is missing", path.display())));
    }
    load(&path)
}

fn run_problem(run_dir: &Path) -> CliResult<nacy_families::Instance> {
    let path = run_dir.join("problem.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::IncompleteRun(format!("{}: {e}", path.display())))?;
    let file: ProblemFile = serde_json::from_str(&text).map_err(|e| CliError::IncompleteRun(format!("{}: {e}", path.display())))?;
    file.rebuild().map_err(|e| CliError::IncompleteRun(e.to_string()))
}

fn point_strings(p: &[Q]) -> impl Iterator<Item = String> + '_ {
    p.iter().map(fmt_q)
}

/// Recomputes the Monge-Ampère residual of a stored minimizer: `ma.csv` (k.., mass, residual,
/// degenerate) and `ma.json`.
pub fn diagnose_ma(run_dir: &Path, face: usize) -> CliResult<f64> {
    let config = run_config(run_dir)?;
    let inst = run_problem(run_dir)?;
    let phi = read_value_column(&run_dir.join("phi.csv"), "phi")?;
    let phi = PotentialField::on_source(&inst.problem, phi).map_err(|e| CliError::IncompleteRun(e.to_string()))?;
    let h = inst.discretization.source_h();
    let r = ma_residual(&phi, &inst.problem.cost.source, face, h).map_err(runtime)?;
    let dim = r.cells.first().map_or(0, |c| c.index.len());
    let mut w = csv_writer(&run_dir.join("ma.csv"))?;
    let mut header: Vec<String> = (0..dim).map(|k| format!("k{k}")).collect();
    header.extend(["mass", "residual", "degenerate"].map(String::from));
    w.write_record(&header).map_err(runtime)?;
    for c in &r.cells {
        let mut rec: Vec<String> = c.index.iter().map(i64::to_string).collect();
        rec.extend([c.mass.to_string(), c.residual.to_string(), c.degenerate.to_string()]);
        w.write_record(&rec).map_err(runtime)?;
    }
    finish(w)?;
    write_json(&run_dir.join("ma.json"), &json!({ "seed": config.seed, "face": face, "h": fmt_q(&h), "residual": r }))?;
    Ok(r.max_residual)
}

/// Solves the role-swapped problem and compares: `duality.csv` (index, p.., phic, dual_phi,
/// residual) and `duality.json`.
pub fn diagnose_duality(run_dir: &Path) -> CliResult<nacy_diagnostics::DualityReport> {
    let config = run_config(run_dir)?;
    let inst = run_problem(run_dir)?;
    let problem = &inst.problem;
    let dual = problem.dual().map_err(runtime)?;
    let res = minimize_kontorovich(problem, &config.solver).map_err(runtime)?;
    let dres = minimize_kontorovich(&dual, &config.solver).map_err(runtime)?;
    let r = duality_check(problem, &dual, &res, &dres).map_err(runtime)?;
    let (phic, _) = c_transform_values(problem, &res.phi.values, Direction::SourceToTarget);

    let dim = problem.nu0.points.first().map_or(0, Vec::len);
    let mut w = csv_writer(&run_dir.join("duality.csv"))?;
    let mut header = vec!["index".to_string()];
    header.extend((0..dim).map(|k| format!("p{k}")));
    header.extend(["phic", "dual_phi", "residual"].map(String::from));
    w.write_record(&header).map_err(runtime)?;
    for (j, p) in problem.nu0.points.iter().enumerate() {
        let mut rec = vec![j.to_string()];
        rec.extend(point_strings(p));
        let d = dres.phi.values[j];
        rec.extend([phic[j], d, d - phic[j] - r.shift].map(|f| f.to_string()));
        w.write_record(&rec).map_err(runtime)?;
    }
    finish(w)?;
    write_json(&run_dir.join("duality.json"), &json!({ "seed": config.seed, "report": r }))?;
    Ok(r)
}

pub fn report(run_dir: &Path, format: ReportFormat) -> CliResult<String> {
    render_report(&read_diagnostics(run_dir)?.assertions, format)
}
