use alloc::vec;
use alloc::vec::Vec;

use super::{Environment, PolicyParams, TrainConfig};
use crate::evt::{
    cvar_pot, cvar_sa, estimate_cvar, select_threshold_detailed, CostSample, CvarEstimate, Estimator,
    ThresholdConfig,
};
use crate::{Error, Result};

/// What the shocked batches inherit from the threshold selected on the base batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ThresholdSharing {
    /// The selected candidate quantile level; each shocked batch places its
    /// threshold at that level of its own sample.
    #[default]
    Level,
    /// The threshold value `u` itself.
    Value,
}

impl ThresholdSharing {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThresholdSharing::Value => "value",
            ThresholdSharing::Level => "level",
        }
    }
}

impl core::str::FromStr for ThresholdSharing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "value" => Ok(ThresholdSharing::Value),
            "level" => Ok(ThresholdSharing::Level),
            _ => Err(Error::InvalidParameter("threshold sharing must be `value` or `level`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    pub grad: Vec<f64>,
    /// `Ĵ(θ)` on the base batch.
    pub base: CvarEstimate,
    /// `Ĵ(θ + ε e_i)` for each coordinate.
    pub shocked: Vec<CvarEstimate>,
    /// Threshold chosen on the base batch.
    pub threshold: Option<f64>,
    /// Candidate quantile level of that threshold.
    pub threshold_level: Option<f64>,
}

/// POT estimate on the base batch together with the selected candidate level.
fn base_pot(sample: &CostSample, cfg: &TrainConfig) -> (CvarEstimate, Option<f64>) {
    let sel = select_threshold_detailed(sample, &cfg.threshold);
    let level = sel.selected.map(|i| sel.candidates[i].level);
    match cvar_pot(&sel.fit, cfg.level) {
        Ok(est) => (est, level),
        Err(_) => (cvar_sa(sample, cfg.level), None),
    }
}

/// Forward finite-difference gradient of `Ĵ` at `theta`.
///
/// The base batch and every shocked batch are simulated with the same
/// `seed`. Under the POT estimator the threshold selected on the base batch
/// is shared with the shocked batches as set by `cfg.sharing`; when the base
/// estimate itself fell back to sample averaging, the shocked batches are
/// averaged the same way.
pub fn finite_diff_gradient<E: Environment + ?Sized>(
    env: &E,
    theta: &PolicyParams,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<GradientEstimate> {
    if !(cfg.eps > 0.0) {
        return Err(Error::InvalidParameter("finite-difference step must be positive"));
    }
    if theta.dim() != env.dim() {
        return Err(Error::DimensionMismatch { expected: env.dim(), actual: theta.dim() });
    }
    let base_sample = env.sample_costs(theta, cfg.n, seed)?;
    let (base, threshold_level) = match cfg.estimator {
        Estimator::Sa => (cvar_sa(&base_sample, cfg.level), None),
        Estimator::Pot => base_pot(&base_sample, cfg),
    };
    let threshold = base.breakdown.map(|b| b.u);
    let pinned = threshold_level
        .map(|q| ThresholdConfig { quantile_levels: vec![q], ..cfg.threshold.clone() });

    let mut grad = Vec::with_capacity(theta.dim());
    let mut shocked = Vec::with_capacity(theta.dim());
    for i in 0..theta.dim() {
        let sample = env.sample_costs(&theta.shocked(i, cfg.eps), cfg.n, seed)?;
        let est = match (base.method, cfg.sharing, &pinned) {
            (Estimator::Sa, _, _) => cvar_sa(&sample, cfg.level),
            (Estimator::Pot, ThresholdSharing::Level, Some(pinned)) => {
                estimate_cvar(&sample, cfg.level, pinned, None)
            }
            (Estimator::Pot, _, _) => estimate_cvar(&sample, cfg.level, &cfg.threshold, threshold),
        };
        grad.push((est.value - base.value) / cfg.eps);
        shocked.push(est);
    }
    Ok(GradientEstimate { grad, base, shocked, threshold, threshold_level })
}
