//! The `potpg` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use potpg_core::env::hedging::SweepCurve;
use potpg_core::evt::{
    cvar_sa, estimate_cvar, select_threshold_detailed, var_empirical, CostSample, Estimator, FitMethod, RiskLevel,
    ThresholdConfig,
};
use potpg_core::optimizer::{Environment, PolicyParams, ThresholdSharing};
use serde_json::json;

use crate::error::{HarnessError, Result};
use crate::experiment::{preset, preset_names, BuiltEnv, ExperimentSpec};
use crate::formats::{read_sample_file, write_sweep, COMPARISON_FILE};
use crate::run::{report_directory, run_experiment, write_outputs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "potpg", version, about = "Tail-risk policy gradients with peaks-over-threshold CVaR estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select a threshold, fit the GPD tail and report both CVaR estimates.
    FitTail {
        sample: PathBuf,
        #[arg(long, default_value_t = 0.998)]
        alpha: f64,
        #[command(flatten)]
        tail: TailArgs,
    },
    /// Estimate the CVaR of a sample.
    Cvar {
        sample: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = EstimatorArg::Pot)]
        estimator: EstimatorArg,
        #[command(flatten)]
        tail: TailArgs,
    },
    /// Train every configured estimator over R runs and write traces and RMSE tables.
    Train {
        #[command(flatten)]
        source: SpecSource,
        /// Train only this estimator.
        #[arg(long, value_enum)]
        estimator: Option<EstimatorArg>,
        /// Number of independent runs per estimator
        #[arg(long)]
        runs: Option<usize>,
        /// Base seed of the experiment.
        #[arg(long)]
        seed: Option<u64>,
        /// How shocked batches reuse the base threshold
        #[arg(long, value_enum)]
        sharing: Option<SharingArg>,
        /// Output directory; defaults to the experiment's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force CVaR curve over a grid of scalar policies with common paths.
    SweepTheta {
        #[command(flatten)]
        source: SpecSource,
        /// `start:stop:step`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        paths: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// CSV destination; the curve is printed either way.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild and print the RMSE comparison of a results directory.
    Report {
        #[arg(long = "in")]
        dir: PathBuf,
    },
    /// List the built-in experiments, or print one.
    Presets { name: Option<String> },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SpecSource {
    /// Experiment file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in experiment name.
    #[arg(long)]
    preset: Option<String>,
}

impl SpecSource {
    fn load(&self) -> Result<ExperimentSpec> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentSpec::from_file(path),
            (None, Some(name)) => preset(name),
            (None, None) => Err(HarnessError::config("arguments", "--config or --preset is required")),
        }
    }
}

#[derive(Debug, Args)]
struct TailArgs {
    /// Candidate quantile levels: `start:stop:step` or a comma list.
    #[arg(long)]
    q_levels: Option<String>,
    #[arg(long)]
    xi_max: Option<f64>,
    #[arg(long)]
    significance: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

impl TailArgs {
    fn config(&self) -> Result<ThresholdConfig> {
        let mut c = ThresholdConfig::default();
        if let Some(q) = &self.q_levels {
            c.quantile_levels = parse_levels(q)?;
        }
        if let Some(x) = self.xi_max {
            c.xi_max = x;
        }
        if let Some(g) = self.significance {
            c.significance = g;
        }
        if let Some(m) = self.method {
            c.fit_method = m.into();
        }
        c.validate().map_err(|e| HarnessError::config("arguments", e.to_string()))?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Pot,
    Sa,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Pot => Estimator::Pot,
            EstimatorArg::Sa => Estimator::Sa,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Mle,
    Mom,
}

impl From<MethodArg> for FitMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mle => FitMethod::Mle,
            MethodArg::Mom => FitMethod::Mom,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SharingArg {
    Level,
    Value,
}

impl From<SharingArg> for ThresholdSharing {
    fn from(s: SharingArg) -> Self {
        match s {
            SharingArg::Level => ThresholdSharing::Level,
            SharingArg::Value => ThresholdSharing::Value,
        }
    }
}

/// `start:stop:step` (inclusive of `stop` up to rounding) or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| HarnessError::config("arguments", format!("grid `{text}`: {m}"));
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad("not a number"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(bad("needs start <= stop and a positive step"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(bad("too many points"));
            }
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        [single] => single.split(',').map(num).collect(),
        _ => Err(bad("expected start:stop:step or a comma list")),
    }
}

fn parse_levels(text: &str) -> Result<Vec<f64>> {
    let levels = parse_grid(text)?;
    // 0.79 + 19·0.01 lands a few ulps off 0.98; snap to the step's decimals
    Ok(levels.into_iter().map(|q| (q * 1e9).round() / 1e9).collect())
}

fn level(alpha: f64) -> Result<RiskLevel> {
    RiskLevel::new(alpha).map_err(|e| HarnessError::config("arguments", format!("--alpha: {e}")))
}

fn load_sample(path: &Path) -> Result<CostSample> {
    Ok(CostSample::new(read_sample_file(path)?)?)
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json")).map_err(|e| HarnessError::io("stdout", e))
}

fn fit_tail(out: &mut dyn Write, sample: &Path, alpha: f64, tail: &TailArgs) -> Result<()> {
    let s = load_sample(sample)?;
    let lvl = level(alpha)?;
    let cfg = tail.config()?;
    let sel = select_threshold_detailed(&s, &cfg);
    let pot = estimate_cvar(&s, lvl, &cfg, None);
    let sa = cvar_sa(&s, lvl);
    print_json(
        out,
        &json!({
            "n": s.len(),
            "alpha": alpha,
            "fit_method": match cfg.fit_method { FitMethod::Mle => "mle", FitMethod::Mom => "mom" },
            "tail_fit": sel.fit,
            "fallback": sel.fit.is_fallback(),
            "selected": sel.selected,
            "candidates": sel.candidates,
            "var": var_empirical(&s, lvl),
            "cvar_pot": pot,
            "cvar_sa": sa,
        }),
    )
}

fn cvar(out: &mut dyn Write, sample: &Path, alpha: f64, estimator: Estimator, tail: &TailArgs) -> Result<()> {
    let s = load_sample(sample)?;
    let lvl = level(alpha)?;
    let est = match estimator {
        Estimator::Sa => cvar_sa(&s, lvl),
        Estimator::Pot => estimate_cvar(&s, lvl, &tail.config()?, None),
    };
    print_json(out, &json!({ "value": est.value, "method": est.method, "breakdown": est.breakdown }))
}

struct TrainOverrides {
    estimator: Option<Estimator>,
    runs: Option<usize>,
    seed: Option<u64>,
    sharing: Option<ThresholdSharing>,
    out: Option<PathBuf>,
}

fn train(out: &mut dyn Write, mut spec: ExperimentSpec, o: TrainOverrides) -> Result<()> {
    if let Some(e) = o.estimator {
        spec.estimators = vec![e];
    }
    if let Some(r) = o.runs {
        spec.runs = r;
    }
    if let Some(s) = o.seed {
        spec.train.base_seed = s;
    }
    if let Some(s) = o.sharing {
        spec.train.sharing = s;
    }
    let dir = o
        .out
        .or_else(|| spec.output_dir.clone())
        .ok_or_else(|| HarnessError::config("arguments", "no output directory: pass --out or set output_dir"))?;
    spec.validate()?;
    let outcome = run_experiment(&spec)?;
    write_outputs(&outcome, &dir)?;
    let io = |e| HarnessError::io("stdout", e);
    writeln!(out, "environment {}, {} runs x {} iterations", spec.environment.name(), spec.runs, spec.train.iterations)
        .map_err(io)?;
    for eo in &outcome.estimators {
        let finals: Vec<f64> = eo.runs.iter().map(|r| r.trace.final_theta[0]).collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        writeln!(
            out,
            "{:>4}: final RMSE_theta {:.6}, mean final theta {:.6}",
            eo.estimator.as_str(),
            eo.report.final_rmse_theta,
            mean
        )
        .map_err(io)?;
    }
    writeln!(out, "wrote {}", dir.display()).map_err(io)?;
    Ok(())
}

/// SA CVaR at every grid point with one shared batch of episodes.
pub fn sweep_curve(spec: &ExperimentSpec, grid: &[f64], paths: usize, seed: u64) -> Result<SweepCurve> {
    if grid.is_empty() {
        return Err(HarnessError::config("arguments", "empty grid"));
    }
    if paths == 0 {
        return Err(HarnessError::config("arguments", "--paths must be at least 1"));
    }
    let env = spec.build_environment()?;
    match &env {
        BuiltEnv::Hedging(h) => Ok(h.brute_force_curve(grid, paths, seed)?),
        BuiltEnv::Gpd(g) => {
            let values = grid
                .iter()
                .map(|&t| Ok(cvar_sa(&g.sample_costs(&PolicyParams::scalar(t)?, paths, seed)?, spec.train.level).value))
                .collect::<Result<Vec<f64>>>()?;
            let argmin = (0..values.len()).fold(0, |best, i| if values[i] < values[best] { i } else { best });
            Ok(SweepCurve { thetas: grid.to_vec(), values, argmin })
        }
    }
}

fn sweep(out: &mut dyn Write, spec: &ExperimentSpec, grid: &str, paths: usize, seed: u64, dest: Option<&Path>) -> Result<()> {
    let curve = sweep_curve(spec, &parse_grid(grid)?, paths, seed)?;
    if let Some(p) = dest {
        write_sweep(p, &curve)?;
    }
    let io = |e| HarnessError::io("stdout", e);
    writeln!(out, "theta,cvar").map_err(io)?;
    for (t, v) in curve.thetas.iter().zip(&curve.values) {
        writeln!(out, "{t},{v}").map_err(io)?;
    }
    writeln!(out, "# argmin theta {} cvar {}", curve.theta_min(), curve.j_min()).map_err(io)?;
    Ok(())
}

fn report(out: &mut dyn Write, dir: &Path) -> Result<()> {
    let reports = report_directory(dir)?;
    let io = |e| HarnessError::io("stdout", e);
    let mut header = vec!["iteration".to_string()];
    for (e, _) in &reports {
        header.push(format!("rmse_theta_{}", e.as_str()));
        header.push(format!("rmse_objective_{}", e.as_str()));
    }
    writeln!(out, "{}", header.join("\t")).map_err(io)?;
    let m = reports.iter().map(|(_, r)| r.rows.len()).max().unwrap_or(0);
    for j in 0..m {
        let mut row = vec![j.to_string()];
        for (_, r) in &reports {
            match r.rows.get(j) {
                Some(x) => row.extend([format!("{:.6}", x.rmse_theta), format!("{:.6}", x.rmse_objective)]),
                None => row.extend([String::new(), String::new()]),
            }
        }
        writeln!(out, "{}", row.join("\t")).map_err(io)?;
    }
    let mut last = vec!["final".to_string()];
    for (_, r) in &reports {
        last.extend([format!("{:.6}", r.final_rmse_theta), String::new()]);
    }
    writeln!(out, "{}", last.join("\t")).map_err(io)?;
    writeln!(out, "# wrote {}", dir.join(COMPARISON_FILE).display()).map_err(io)?;
    Ok(())
}

fn presets(out: &mut dyn Write, name: Option<&str>) -> Result<()> {
    let io = |e| HarnessError::io("stdout", e);
    match name {
        Some(n) => writeln!(out, "{}", preset(n)?.to_json()).map_err(io),
        None => {
            for n in preset_names() {
                writeln!(out, "{n}").map_err(io)?;
            }
            Ok(())
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::FitTail { sample, alpha, tail } => fit_tail(out, &sample, alpha, &tail),
        Command::Cvar { sample, alpha, estimator, tail } => cvar(out, &sample, alpha, estimator.into(), &tail),
        Command::Train { source, estimator, runs, seed, sharing, out: dir } => train(
            out,
            source.load()?,
            TrainOverrides {
                estimator: estimator.map(Into::into),
                runs,
                seed,
                sharing: sharing.map(Into::into),
                out: dir,
            },
        ),
        Command::SweepTheta { source, grid, paths, seed, out: dest } => {
            sweep(out, &source.load()?, &grid, paths, seed, dest.as_deref())
        }
        Command::Report { dir } => report(out, &dir),
        Command::Presets { name } => presets(out, name.as_deref()),
    }
}

/// Parse `args`, run the command and return the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_input_error() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
