use alloc::vec::Vec;

use crate::math::ceil;
use crate::{Error, Result};

/// A batch of `n ≥ 1` finite cumulative costs for a fixed policy.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CostSample(Vec<f64>);

impl CostSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooFewObservations { required: 1, actual: 0 });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ascending copy of the values; ties keep their original order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }
}

/// Confidence level `α ∈ (0, 1)` of a VaR/CVaR.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct RiskLevel(f64);

impl RiskLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter("risk level must lie in (0, 1)"))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RiskLevel {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<RiskLevel> for f64 {
    fn from(level: RiskLevel) -> f64 {
        level.0
    }
}

/// 1-based index `⌈p·n⌉` of the empirical `p`-quantile among `n` order statistics.
///
/// A relative slack of 1e-12 absorbs representation error in `p·n`
/// (so `0.998·2000` maps to 1996 rather than 1997). The result is clamped
/// to `1..=n`.
pub fn order_statistic_index(p: f64, n: usize) -> usize {
    let x = p * n as f64;
    let idx = ceil(x - 1e-12 * x.max(1.0)) as usize;
    idx.clamp(1, n)
}
