//! Multi-run orchestration and result persistence.

use std::path::Path;
use std::time::Instant;

use potpg_core::evt::Estimator;
use potpg_core::optimizer::{potpg_train, rmse_report, RmseReport, TrainTrace};
use potpg_core::seed::mix_seed;
use rayon::prelude::*;

use crate::error::{HarnessError, Result};
use crate::experiment::{ExperimentSpec, Reference};
use crate::formats::{
    config_hash, rmse_file_name, trace_file_name, write_comparison, write_rmse, write_trace, EstimatorEntry, Manifest,
    RunEntry, COMPARISON_FILE, MANIFEST_FILE, MANIFEST_SCHEMA,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub trace: TrainTrace,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutcome {
    pub estimator: Estimator,
    pub runs: Vec<RunResult>,
    pub report: RmseReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub reference: Reference,
    pub estimators: Vec<EstimatorOutcome>,
    pub wall_time_s: f64,
}

impl ExperimentOutcome {
    pub fn get(&self, estimator: Estimator) -> Option<&EstimatorOutcome> {
        self.estimators.iter().find(|e| e.estimator == estimator)
    }
}

/// Base seed of run `r`: `mix_seed(base_seed, r)`, shared by all estimators.
pub fn run_seed(spec: &ExperimentSpec, run: usize) -> u64 {
    let index = if spec.shared_run_seed { 0 } else { run as u64 };
    mix_seed(spec.train.base_seed, index)
}

/// Train `spec.runs` independent runs per estimator.
///
/// Runs execute in parallel; results are ordered by estimator, then run
/// index, regardless of scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let start = Instant::now();
    let env = spec.build_environment()?;
    let reference = spec.reference(&env)?;
    let jobs: Vec<(Estimator, usize)> =
        spec.estimators.iter().flat_map(|e| (0..spec.runs).map(move |r| (*e, r))).collect();
    let results: Vec<(Estimator, RunResult)> = jobs
        .par_iter()
        .map(|&(estimator, run)| {
            let seed = run_seed(spec, run);
            let cfg = potpg_core::optimizer::TrainConfig { base_seed: seed, ..spec.train_config(estimator) };
            let t0 = Instant::now();
            let trace = potpg_train(&env, &cfg)?;
            Ok((estimator, RunResult { run, seed, trace, wall_time_s: t0.elapsed().as_secs_f64() }))
        })
        .collect::<Result<_>>()?;

    let mut estimators = Vec::with_capacity(spec.estimators.len());
    for &estimator in &spec.estimators {
        let runs: Vec<RunResult> =
            results.iter().filter(|(e, _)| *e == estimator).map(|(_, r)| r.clone()).collect();
        let traces: Vec<TrainTrace> = runs.iter().map(|r| r.trace.clone()).collect();
        let report = rmse_report(&traces, &reference.theta_star, reference.j_star)?;
        estimators.push(EstimatorOutcome { estimator, runs, report });
    }
    Ok(ExperimentOutcome { spec: spec.clone(), reference, estimators, wall_time_s: start.elapsed().as_secs_f64() })
}

/// Write traces, RMSE tables, the comparison table and the manifest to `dir`.
pub fn write_outputs(outcome: &ExperimentOutcome, dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut entries = Vec::with_capacity(outcome.estimators.len());
    let mut reports = Vec::with_capacity(outcome.estimators.len());
    for eo in &outcome.estimators {
        let mut runs = Vec::with_capacity(eo.runs.len());
        for r in &eo.runs {
            let rel = Path::new(&trace_file_name(eo.estimator, r.run)).to_path_buf();
            write_trace(&dir.join(&rel), &r.trace.records)?;
            runs.push(RunEntry {
                run: r.run,
                seed: r.seed,
                trace_file: rel,
                final_theta: r.trace.final_theta.clone(),
                wall_time_s: r.wall_time_s,
            });
        }
        let rmse_file = Path::new(&rmse_file_name(eo.estimator)).to_path_buf();
        write_rmse(&dir.join(&rmse_file), &eo.report)?;
        entries.push(EstimatorEntry {
            estimator: eo.estimator,
            rmse_file,
            final_rmse_theta: eo.report.final_rmse_theta,
            runs,
        });
        reports.push((eo.estimator, eo.report.clone()));
    }
    write_comparison(&dir.join(COMPARISON_FILE), &reports)?;
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: config_hash(&outcome.spec),
        spec: outcome.spec.clone(),
        reference: outcome.reference.clone(),
        estimators: entries,
        wall_time_s: outcome.wall_time_s,
    };
    manifest.write(&dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

/// Rebuild the RMSE tables of a results directory from its manifest and
/// trace files, rewrite them, and return them in manifest order.
pub fn report_directory(dir: &Path) -> Result<Vec<(Estimator, RmseReport)>> {
    let manifest = Manifest::read(&dir.join(MANIFEST_FILE))?;
    let mut reports = Vec::with_capacity(manifest.estimators.len());
    for entry in &manifest.estimators {
        let traces = entry
            .runs
            .iter()
            .map(|r| {
                let records = crate::formats::read_trace(&dir.join(&r.trace_file))?;
                if records.len() != manifest.spec.train.iterations {
                    return Err(HarnessError::schema(
                        dir.join(&r.trace_file),
                        format!("{} rows, manifest expects {}", records.len(), manifest.spec.train.iterations),
                    ));
                }
                Ok(TrainTrace { records, final_theta: r.final_theta.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        let report = rmse_report(&traces, &manifest.reference.theta_star, manifest.reference.j_star)?;
        write_rmse(&dir.join(&entry.rmse_file), &report)?;
        reports.push((entry.estimator, report));
    }
    write_comparison(&dir.join(COMPARISON_FILE), &reports)?;
    Ok(reports)
}
