use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{finite_diff_gradient, AdamConfig, AdamState, Environment, PolicyParams, ThresholdSharing};
use crate::evt::{Estimator, RiskLevel, ThresholdConfig};
use crate::seed::mix_seed;
use crate::{Error, Result};

/// Settings of one training run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TrainConfig {
    /// Episodes per batch.
    pub n: usize,
    /// Number of gradient steps `M`.
    pub iterations: usize,
    /// Finite-difference step `ε`.
    pub eps: f64,
    pub level: RiskLevel,
    /// ADAM step size.
    pub step_size: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub estimator: Estimator,
    #[cfg_attr(feature = "serde", serde(default))]
    pub threshold: ThresholdConfig,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sharing: ThresholdSharing,
    #[cfg_attr(feature = "serde", serde(default))]
    pub adam: AdamConfig,
    pub base_seed: u64,
    pub theta0: PolicyParams,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("batch size n must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iteration count must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter("finite-difference step must be positive"));
        }
        if !(self.step_size >= 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidParameter("step size must be non-negative"));
        }
        self.threshold.validate()
    }
}

/// Uniform random initial policy on `[low, high)^dim`.
pub fn random_theta0(dim: usize, low: f64, high: f64, seed: u64) -> Result<PolicyParams> {
    if !(low < high) {
        return Err(Error::InvalidParameter("random initialization needs low < high"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PolicyParams::new((0..dim).map(|_| rng.random_range(low..high)).collect())
}

/// State and estimate at the start of iteration `iteration`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IterationRecord {
    pub iteration: usize,
    /// `θ^(j)`.
    pub theta: Vec<f64>,
    /// `Ĵ(θ^(j))`.
    pub objective: f64,
    /// Estimator that actually produced `objective`.
    pub method: Estimator,
    pub threshold: Option<f64>,
    /// Candidate quantile level of `threshold`.
    pub threshold_level: Option<f64>,
    /// POT was requested but sample averaging was used.
    pub fallback: bool,
    pub gradient: Vec<f64>,
    pub batch_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrainTrace {
    /// One record per iteration, `j = 0..M-1`.
    pub records: Vec<IterationRecord>,
    /// `θ^(M)` after the last update.
    pub final_theta: Vec<f64>,
}

pub fn potpg_train<E: Environment + ?Sized>(env: &E, cfg: &TrainConfig) -> Result<TrainTrace> {
    potpg_train_with(env, cfg, |_| {})
}

/// Training loop; `observe` is called after every iteration.
///
/// Iteration `j` draws its batches with seed `mix_seed(base_seed, j)`, so
/// batches are fresh across iterations and shared between the base and
/// shocked policies within one.
pub fn potpg_train_with<E, F>(env: &E, cfg: &TrainConfig, mut observe: F) -> Result<TrainTrace>
where
    E: Environment + ?Sized,
    F: FnMut(&IterationRecord),
{
    cfg.validate()?;
    if cfg.theta0.dim() != env.dim() {
        return Err(Error::DimensionMismatch { expected: env.dim(), actual: cfg.theta0.dim() });
    }
    let mut theta = cfg.theta0.clone();
    let mut adam = AdamState::new(theta.dim(), cfg.adam);
    let mut records = Vec::with_capacity(cfg.iterations);
    for j in 0..cfg.iterations {
        let batch_seed = mix_seed(cfg.base_seed, j as u64);
        let g = finite_diff_gradient(env, &theta, cfg, batch_seed)?;
        let delta = adam.step(&g.grad, cfg.step_size)?;
        let record = IterationRecord {
            iteration: j,
            theta: theta.as_slice().to_vec(),
            objective: g.base.value,
            method: g.base.method,
            threshold: g.threshold,
            threshold_level: g.threshold_level,
            fallback: cfg.estimator == Estimator::Pot && g.base.method == Estimator::Sa,
            gradient: g.grad,
            batch_seed,
        };
        observe(&record);
        records.push(record);
        let next: Vec<f64> = theta.as_slice().iter().zip(&delta).map(|(t, d)| t + d).collect();
        theta = PolicyParams::new(next)?;
    }
    Ok(TrainTrace { records, final_theta: theta.as_slice().to_vec() })
}
