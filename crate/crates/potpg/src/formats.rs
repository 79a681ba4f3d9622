//! Versioned on-disk formats.
//!
//! Every CSV starts with a `#schema=<name>/<version>` line followed by a
//! fixed header row; both are checked on read. Reals are written in the
//! shortest representation that parses back to the same `f64`, so files
//! round-trip exactly. Absent values are empty cells.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use potpg_core::env::hedging::SweepCurve;
use potpg_core::evt::Estimator;
use potpg_core::optimizer::{IterationRecord, RmseReport, RmseRow};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiment::{ExperimentSpec, Reference};

pub const TRACE_SCHEMA: &str = "trace/1";
pub const RMSE_SCHEMA: &str = "rmse/1";
pub const COMPARISON_SCHEMA: &str = "rmse-comparison/1";
pub const SWEEP_SCHEMA: &str = "sweep/1";
pub const MANIFEST_SCHEMA: &str = "manifest/1";

pub const MANIFEST_FILE: &str = "manifest.json";
pub const COMPARISON_FILE: &str = "rmse_comparison.csv";

pub fn rmse_file_name(estimator: Estimator) -> String {
    format!("rmse_{}.csv", estimator.as_str())
}

pub fn trace_file_name(estimator: Estimator, run: usize) -> String {
    format!("{}/run_{run:04}.csv", estimator.as_str())
}

fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, schema: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let fail = |e: csv::Error| HarnessError::io(path, std::io::Error::other(e));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    let body = w.into_inner().map_err(|e| HarnessError::io(path, std::io::Error::other(e.to_string())))?;
    let mut out = format!("#schema={schema}\n").into_bytes();
    out.extend_from_slice(&body);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

/// Checks the schema line and returns the header and data rows.
fn read_csv(path: &Path, schema: &str) -> Result<(Vec<String>, Vec<(usize, Vec<String>)>)> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let (first, rest) = text.split_once('\n').unwrap_or((text.as_str(), ""));
    let expected = format!("#schema={schema}");
    if first.trim_end() != expected {
        return Err(HarnessError::schema(path, format!("expected `{expected}` on line 1, found `{first}`")));
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(rest.as_bytes());
    let header = r
        .headers()
        .map_err(|e| HarnessError::schema(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| HarnessError::schema(path, e.to_string()))?;
        // one for the schema line, one for the header
        let line = rec.position().map(|p| p.line() as usize + 1).unwrap_or(0);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok((header, rows))
}

fn check_header(path: &Path, found: &[String], expected: &[String]) -> Result<()> {
    if found != expected {
        return Err(HarnessError::schema(
            path,
            format!("columns [{}] do not match [{}]", found.join(","), expected.join(",")),
        ));
    }
    Ok(())
}

fn cell<T: FromStr>(path: &Path, line: usize, column: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| HarnessError::schema(path, format!("line {line}: bad `{column}` value `{value}`")))
}

fn opt_cell<T: FromStr>(path: &Path, line: usize, column: &str, value: &str) -> Result<Option<T>> {
    if value.is_empty() {
        Ok(None)
    } else {
        cell(path, line, column, value).map(Some)
    }
}

fn trace_header(dim: usize) -> Vec<String> {
    let mut h = vec!["iteration".to_string()];
    h.extend((0..dim).map(|i| format!("theta_{i}")));
    h.extend(["objective", "method", "threshold", "threshold_level", "fallback"].map(String::from));
    h.extend((0..dim).map(|i| format!("grad_{i}")));
    h.push("batch_seed".into());
    h
}

/// One row per iteration. The final `θ^(M)` lives in the run manifest.
pub fn write_trace(path: &Path, records: &[IterationRecord]) -> Result<()> {
    let dim = records.first().map_or(1, |r| r.theta.len());
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.iteration.to_string()];
            row.extend(r.theta.iter().map(f64::to_string));
            row.push(r.objective.to_string());
            row.push(r.method.as_str().to_string());
            row.push(opt(r.threshold));
            row.push(opt(r.threshold_level));
            row.push(r.fallback.to_string());
            row.extend(r.gradient.iter().map(f64::to_string));
            row.push(r.batch_seed.to_string());
            row
        })
        .collect();
    write_csv(path, TRACE_SCHEMA, &trace_header(dim), &rows)
}

pub fn read_trace(path: &Path) -> Result<Vec<IterationRecord>> {
    let (header, rows) = read_csv(path, TRACE_SCHEMA)?;
    let dim = header.iter().filter(|c| c.starts_with("theta_")).count();
    if dim == 0 {
        return Err(HarnessError::schema(path, "no theta columns"));
    }
    let expected = trace_header(dim);
    check_header(path, &header, &expected)?;
    rows.iter()
        .map(|(line, row)| {
            let line = *line;
            let f = |i: usize| cell::<f64>(path, line, &expected[i], &row[i]);
            let theta = (1..=dim).map(f).collect::<Result<Vec<_>>>()?;
            let o = dim + 1;
            let gradient = (o + 5..o + 5 + dim).map(f).collect::<Result<Vec<_>>>()?;
            let method: Estimator = cell(path, line, "method", &row[o + 1])?;
            Ok(IterationRecord {
                iteration: cell(path, line, "iteration", &row[0])?,
                theta,
                objective: f(o)?,
                method,
                threshold: opt_cell(path, line, "threshold", &row[o + 2])?,
                threshold_level: opt_cell(path, line, "threshold_level", &row[o + 3])?,
                fallback: cell(path, line, "fallback", &row[o + 4])?,
                gradient,
                batch_seed: cell(path, line, "batch_seed", &row[o + 5 + dim])?,
            })
        })
        .collect()
}

fn rmse_header() -> Vec<String> {
    ["iteration", "rmse_theta", "rmse_objective"].map(String::from).to_vec()
}

/// Rows `j = 0..M-1`, then a row `M` with the final `θ` error and an empty
/// objective cell (the objective is not evaluated after the last update).
pub fn write_rmse(path: &Path, report: &RmseReport) -> Result<()> {
    let mut rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![r.iteration.to_string(), r.rmse_theta.to_string(), r.rmse_objective.to_string()])
        .collect();
    rows.push(vec![report.rows.len().to_string(), report.final_rmse_theta.to_string(), String::new()]);
    write_csv(path, RMSE_SCHEMA, &rmse_header(), &rows)
}

pub fn read_rmse(path: &Path) -> Result<RmseReport> {
    let (header, rows) = read_csv(path, RMSE_SCHEMA)?;
    check_header(path, &header, &rmse_header())?;
    let (last, body) = rows.split_last().ok_or_else(|| HarnessError::schema(path, "no rows"))?;
    let parsed = body
        .iter()
        .map(|(line, row)| {
            Ok(RmseRow {
                iteration: cell(path, *line, "iteration", &row[0])?,
                rmse_theta: cell(path, *line, "rmse_theta", &row[1])?,
                rmse_objective: cell(path, *line, "rmse_objective", &row[2])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if !last.1[2].is_empty() || cell::<usize>(path, last.0, "iteration", &last.1[0])? != parsed.len() {
        return Err(HarnessError::schema(path, "missing final-iterate row"));
    }
    Ok(RmseReport { rows: parsed, final_rmse_theta: cell(path, last.0, "rmse_theta", &last.1[1])? })
}

/// Long format: one row per (iteration, estimator), final-iterate rows
/// included as in [`write_rmse`].
pub fn write_comparison(path: &Path, reports: &[(Estimator, RmseReport)]) -> Result<()> {
    let header = ["iteration", "estimator", "rmse_theta", "rmse_objective"].map(String::from).to_vec();
    let m = reports.iter().map(|(_, r)| r.rows.len()).max().unwrap_or(0);
    let mut rows = Vec::new();
    for j in 0..=m {
        for (est, rep) in reports {
            if let Some(r) = rep.rows.get(j) {
                rows.push(vec![j.to_string(), est.as_str().into(), r.rmse_theta.to_string(), r.rmse_objective.to_string()]);
            } else if j == rep.rows.len() {
                rows.push(vec![j.to_string(), est.as_str().into(), rep.final_rmse_theta.to_string(), String::new()]);
            }
        }
    }
    write_csv(path, COMPARISON_SCHEMA, &header, &rows)
}

pub fn write_sweep(path: &Path, curve: &SweepCurve) -> Result<()> {
    let header = ["theta", "cvar"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> =
        curve.thetas.iter().zip(&curve.values).map(|(t, v)| vec![t.to_string(), v.to_string()]).collect();
    write_csv(path, SWEEP_SCHEMA, &header, &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub run: usize,
    pub seed: u64,
    /// Relative to the manifest directory.
    pub trace_file: PathBuf,
    pub final_theta: Vec<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorEntry {
    pub estimator: Estimator,
    pub rmse_file: PathBuf,
    pub final_rmse_theta: f64,
    pub runs: Vec<RunEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema: String,
    pub version: String,
    /// SHA-256 of the compact JSON form of `spec`.
    pub config_hash: String,
    pub spec: ExperimentSpec,
    pub reference: Reference,
    pub estimators: Vec<EstimatorEntry>,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
            origin: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(HarnessError::schema(path, format!("expected schema `{MANIFEST_SCHEMA}`, found `{}`", m.schema)));
        }
        m.spec.validate()?;
        Ok(m)
    }
}

pub fn config_hash(spec: &ExperimentSpec) -> String {
    use sha2::{Digest, Sha256};
    let compact = serde_json::to_string(spec).expect("experiment spec serializes");
    format!("{:x}", Sha256::digest(compact.as_bytes()))
}

/// Plain-text sample: one real per line; blank lines and `#` comments skipped.
pub fn read_sample_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| HarnessError::Parse {
            origin: path.display().to_string(),
            line: i + 1,
            column: 1,
            message: format!("`{t}` is not a real number"),
        })?;
        if !v.is_finite() {
            return Err(HarnessError::Parse {
                origin: path.display().to_string(),
                line: i + 1,
                column: 1,
                message: "values must be finite".into(),
            });
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(HarnessError::config(path.display().to_string(), "sample file holds no values"));
    }
    Ok(out)
}
