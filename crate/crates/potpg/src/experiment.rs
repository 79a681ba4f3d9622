//! Experiment files: environment, training settings, run count and the
//! reference optimum used for RMSE curves.

use std::path::{Path, PathBuf};

use potpg_core::env::gpd::{self, GpdEnv, GpdEnvConfig};
use potpg_core::env::hedging::{self, HedgeConfig, HedgeEnv, HedgeMarket};
use potpg_core::evt::{CostSample, Estimator};
use potpg_core::optimizer::{Environment, PolicyParams, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment selection, tagged by its registered name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnvSpec {
    Gpd {
        #[serde(default)]
        config: GpdEnvConfig,
    },
    Hedging {
        #[serde(default)]
        market: HedgeMarket,
        #[serde(default)]
        config: HedgeConfig,
    },
}

impl EnvSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EnvSpec::Gpd { .. } => gpd::NAME,
            EnvSpec::Hedging { .. } => hedging::NAME,
        }
    }
}

/// Optimal policy and objective the runs are scored against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub theta_star: Vec<f64>,
    pub j_star: f64,
}

fn default_estimators() -> Vec<Estimator> {
    vec![Estimator::Pot, Estimator::Sa]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub environment: EnvSpec,
    /// The `estimator` field is ignored; every entry of `estimators` is run.
    pub train: TrainConfig,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<Estimator>,
    pub runs: usize,
    /// Taken from the closed form (GPD) or the tabulated sweep optimum
    /// (default hedging problem) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Diagnostic: every run uses the seed of run 0.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub shared_run_seed: bool,
}

const PRESETS: [(&str, &str); 4] = [
    ("gpd-desk", include_str!("../presets/gpd-desk.json")),
    ("gpd-full", include_str!("../presets/gpd-full.json")),
    ("hedging-desk", include_str!("../presets/hedging-desk.json")),
    ("hedging-full", include_str!("../presets/hedging-full.json")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| HarnessError::config("preset", format!("unknown preset `{name}`")))?;
    ExperimentSpec::from_json(text, &format!("preset {name}"))
}

impl ExperimentSpec {
    /// Parse and validate; `origin` names the document in diagnostics.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        spec.validate().map_err(|e| match e {
            HarnessError::Core(c) => HarnessError::config(origin, c.to_string()),
            HarnessError::Config { message, .. } => HarnessError::config(origin, message),
            other => other,
        })?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::config("experiment", m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.estimators.is_empty() {
            return bad("estimators must not be empty".into());
        }
        if self.estimators.iter().enumerate().any(|(i, e)| self.estimators[..i].contains(e)) {
            return bad("estimators must be distinct".into());
        }
        let core = |r: potpg_core::Result<()>| r.map_err(|e| HarnessError::config("experiment", e.to_string()));
        core(self.train.validate())?;
        match &self.environment {
            EnvSpec::Gpd { config } => core(config.validate())?,
            EnvSpec::Hedging { market, config } => {
                core(market.validate())?;
                core(config.validate())?;
                if config.level != self.train.level {
                    return bad("train.level must equal environment.config.level".into());
                }
            }
        }
        if self.train.theta0.dim() != 1 {
            return bad(format!("theta0 has dimension {}, the environment expects 1", self.train.theta0.dim()));
        }
        if let Some(r) = &self.reference {
            if r.theta_star.len() != 1 || !r.theta_star.iter().all(|t| t.is_finite()) || !r.j_star.is_finite() {
                return bad("reference needs one finite theta_star and a finite j_star".into());
            }
        }
        Ok(())
    }

    /// Training settings for one estimator.
    pub fn train_config(&self, estimator: Estimator) -> TrainConfig {
        TrainConfig { estimator, ..self.train.clone() }
    }

    pub fn build_environment(&self) -> Result<BuiltEnv> {
        Ok(match &self.environment {
            EnvSpec::Gpd { config } => BuiltEnv::Gpd(GpdEnv::new(*config)?),
            EnvSpec::Hedging { market, config } => BuiltEnv::Hedging(Box::new(HedgeEnv::new(*market, *config)?)),
        })
    }

    /// Explicit reference if given, otherwise the known optimum of the
    /// environment.
    pub fn reference(&self, env: &BuiltEnv) -> Result<Reference> {
        if let Some(r) = &self.reference {
            return Ok(r.clone());
        }
        match (env, &self.environment) {
            (BuiltEnv::Gpd(e), _) => Ok(Reference { theta_star: vec![e.theta_star()], j_star: e.j_star(self.train.level) }),
            (BuiltEnv::Hedging(_), EnvSpec::Hedging { market, config })
                if *market == HedgeMarket::default() && *config == HedgeConfig::default() =>
            {
                Ok(Reference { theta_star: vec![hedging::THETA_STAR], j_star: hedging::J_STAR })
            }
            _ => Err(HarnessError::config(
                "experiment",
                "a non-default hedging problem needs an explicit reference {theta_star, j_star}",
            )),
        }
    }
}

/// An environment instantiated from an [`EnvSpec`].
pub enum BuiltEnv {
    Gpd(GpdEnv),
    Hedging(Box<HedgeEnv>),
}

impl Environment for BuiltEnv {
    fn dim(&self) -> usize {
        match self {
            BuiltEnv::Gpd(e) => e.dim(),
            BuiltEnv::Hedging(e) => e.dim(),
        }
    }

    fn sample_costs(&self, theta: &PolicyParams, n: usize, seed: u64) -> potpg_core::Result<CostSample> {
        match self {
            BuiltEnv::Gpd(e) => e.sample_costs(theta, n, seed),
            BuiltEnv::Hedging(e) => e.sample_costs(theta, n, seed),
        }
    }
}
