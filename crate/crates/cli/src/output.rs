//! Artifact files: JSON documents, fixed-column CSV tables and the assertion summary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use nacy_polyhedral::{fmt_q, DiscreteMeasure};
use serde::{Deserialize, Serialize};

use crate::error::{runtime, CliError, CliResult};

/// One enabled check: `pass` iff `observed` is within `tolerance` of `expected` under the check's rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionRow {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl AssertionRow {
    /// `|observed − expected| ≤ tolerance`.
    pub fn within(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        let pass = (observed - expected).abs() <= tolerance;
        Self { name: name.into(), expected, observed, tolerance, pass }
    }

    /// `observed ≤ tolerance`, for residuals whose expected value is zero.
    pub fn at_most(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Self { name: name.into(), expected: 0.0, observed, tolerance, pass: observed <= tolerance }
    }

    /// A boolean check, recorded as `1` expected against `0`/`1` observed.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), expected: 1.0, observed: if ok { 1.0 } else { 0.0 }, tolerance: 0.0, pass: ok }
    }
}

/// `diagnostics.json`: the assertion table plus the raw reports behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsFile {
    pub seed: u64,
    pub assertions: Vec<AssertionRow>,
    #[serde(default)]
    pub details: serde_json::Map<String, serde_json::Value>,
}

impl DiagnosticsFile {
    pub fn failed(&self) -> usize {
        self.assertions.iter().filter(|a| !a.pass).count()
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(runtime)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn csv_writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

pub fn finish<W: Write>(w: csv::Writer<W>) -> CliResult<()> {
    w.into_inner().map_err(|e| runtime(e.to_string()))?.flush().map_err(runtime)?;
    Ok(())
}

fn coord_header(prefix: &str, dim: usize) -> Vec<String> {
    (0..dim).map(|k| format!("{prefix}{k}")).collect()
}

/// `index, face, <coords>, mass, <extra columns>…, <value>` for each grid point.
pub fn write_grid_csv(
    path: &Path,
    measure: &DiscreteMeasure,
    coord_prefix: &str,
    extra: &[(&str, &[f64])],
) -> CliResult<()> {
    let dim = measure.points.first().map_or(0, Vec::len);
    let mut w = csv_writer(path)?;
    let mut header = vec!["index".to_string(), "face".to_string()];
    header.extend(coord_header(coord_prefix, dim));
    header.push("mass".into());
    header.extend(extra.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header).map_err(runtime)?;
    for (i, p) in measure.points.iter().enumerate() {
        let mut row = vec![i.to_string(), measure.faces[i].to_string()];
        row.extend(p.iter().map(fmt_q));
        row.push(measure.weights[i].to_string());
        row.extend(extra.iter().map(|(_, col)| col[i].to_string()));
        w.write_record(&row).map_err(runtime)?;
    }
    finish(w)
}

/// Reads the last column of a grid CSV, checking that rows are in index order.
pub fn read_value_column(path: &Path, column: &str) -> CliResult<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::IncompleteRun(format!("{}: {e}", path.display())))?;
    let headers = r.headers().map_err(runtime)?.clone();
    let at = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| runtime(format!("{}: no column {column}", path.display())))?;
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(runtime)?;
        if rec.get(0).and_then(|s| s.parse::<usize>().ok()) != Some(k) {
            return Err(runtime(format!("{}: row {k} out of order", path.display())));
        }
        out.push(rec[at].parse::<f64>().map_err(runtime)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub fn read_diagnostics(run_dir: &Path) -> CliResult<DiagnosticsFile> {
    let path = run_dir.join("diagnostics.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::IncompleteRun(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::IncompleteRun(format!("{}: {e}", path.display())))
}

/// The assertion table of a run directory, rendered as CSV or JSON.
pub fn render_report(rows: &[AssertionRow], format: ReportFormat) -> CliResult<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(runtime)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(runtime)?;
            }
            if rows.is_empty() {
                w.write_record(["name", "expected", "observed", "tolerance", "pass"]).map_err(runtime)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| runtime(e.to_string()))?).map_err(runtime)
        }
    }
}

/// Inverse of [`render_report`].
pub fn parse_report(text: &str, format: ReportFormat) -> CliResult<Vec<AssertionRow>> {
    match format {
        ReportFormat::Json => serde_json::from_str(text).map_err(runtime),
        ReportFormat::Csv => csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<Vec<AssertionRow>, _>>()
            .map_err(runtime),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_formats_round_trip() {
        let rows = vec![
            AssertionRow::within("lp_value", 0.1 + 0.2, 0.30000000000000004, 1e-6),
            AssertionRow::at_most("ma_residual", 1.0 / 3.0, 0.25),
            AssertionRow::holds("independent", true),
        ];
        for f in [ReportFormat::Csv, ReportFormat::Json] {
            assert_eq!(parse_report(&render_report(&rows, f).unwrap(), f).unwrap(), rows);
        }
        assert!(!rows[1].pass);
    }
}
