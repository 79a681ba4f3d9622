//! Finite-difference policy gradients and the training loop.
//!
//! The objective `J(θ)` is the CVaR of the cumulative discounted cost and is
//! *minimized*: each iteration moves θ against the estimated gradient.

mod adam;
mod gradient;
mod rmse;
mod train;

use alloc::vec::Vec;

pub use adam::{AdamConfig, AdamState};
pub use gradient::{finite_diff_gradient, GradientEstimate, ThresholdSharing};
pub use rmse::{rmse_report, RmseReport, RmseRow};
pub use train::{potpg_train, potpg_train_with, random_theta0, IterationRecord, TrainConfig, TrainTrace};

use crate::evt::CostSample;
use crate::{Error, Result};

/// Policy parameter vector `θ ∈ ℝ^p`, `p ≥ 1`, all finite.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<f64>", into = "Vec<f64>"))]
pub struct PolicyParams(Vec<f64>);

impl PolicyParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidParameter("policy needs at least one parameter"));
        }
        if let Some(i) = theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(theta))
    }

    pub fn scalar(theta: f64) -> Result<Self> {
        Self::new(alloc::vec![theta])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `θ + ε·e_i`.
    pub fn shocked(&self, i: usize, eps: f64) -> Self {
        let mut v = self.0.clone();
        v[i] += eps;
        Self(v)
    }
}

impl TryFrom<Vec<f64>> for PolicyParams {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PolicyParams> for Vec<f64> {
    fn from(p: PolicyParams) -> Vec<f64> {
        p.0
    }
}

/// A simulator of cumulative discounted costs under a parametric policy.
///
/// Implementations must be deterministic in `(theta, n, seed)`: identical
/// arguments give identical samples. Calls that share a seed share the
/// underlying random numbers, which is what makes finite differences cancel
/// simulation noise.
pub trait Environment {
    /// Policy dimension `p`.
    fn dim(&self) -> usize;

    fn sample_costs(&self, theta: &PolicyParams, n: usize, seed: u64) -> Result<CostSample>;
}

impl<E: Environment + ?Sized> Environment for &E {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn sample_costs(&self, theta: &PolicyParams, n: usize, seed: u64) -> Result<CostSample> {
        (**self).sample_costs(theta, n, seed)
    }
}
