//! Automated threshold selection by sequential Anderson-Darling tests.

use alloc::vec::Vec;

use super::anderson_darling::{ad_pvalue, ad_statistic};
use super::fit::{fit_gpd, FitMethod};
use super::sample::order_statistic_index;
use super::{CostSample, GpdParams};
use crate::math::ln_1p;
use crate::{Error, Result};

/// Candidate quantile levels, shape cutoff, test size and fit method.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct ThresholdConfig {
    pub quantile_levels: Vec<f64>,
    pub xi_max: f64,
    pub significance: f64,
    pub fit_method: FitMethod,
}

impl Default for ThresholdConfig {
    /// Twenty levels 0.79, 0.80, ..., 0.98, `ξ_max = 0.9`, `γ = 0.05`, MLE.
    fn default() -> Self {
        Self {
            quantile_levels: (0..20).map(|i| (79 + i) as f64 / 100.0).collect(),
            xi_max: 0.9,
            significance: 0.05,
            fit_method: FitMethod::Mle,
        }
    }
}

impl ThresholdConfig {
    pub fn with_method(mut self, method: FitMethod) -> Self {
        self.fit_method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.quantile_levels.is_empty() {
            return Err(Error::InvalidParameter("at least one threshold level is required"));
        }
        if self.quantile_levels.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            return Err(Error::InvalidParameter("threshold levels must lie in (0, 1)"));
        }
        if self.quantile_levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("threshold levels must be strictly ascending"));
        }
        if !(self.xi_max > 0.0 && self.xi_max < 1.0) {
            return Err(Error::InvalidParameter("xi_max must lie in (0, 1)"));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::InvalidParameter("significance must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Outcome of threshold selection.
///
/// `params` is `None` when no candidate threshold produced an admissible
/// fit; `u`, `k` and `fu_hat` then describe the lowest candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TailFit {
    pub u: f64,
    pub params: Option<GpdParams>,
    /// Empirical CDF at the threshold, `(n - k)/n`.
    pub fu_hat: f64,
    pub k: usize,
}

impl TailFit {
    pub fn is_fallback(&self) -> bool {
        self.params.is_none()
    }
}

/// Per-threshold diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Candidate {
    pub level: f64,
    pub u: f64,
    pub k: usize,
    pub params: Option<GpdParams>,
    pub a2: Option<f64>,
    pub p_value: Option<f64>,
    /// Fit accepted (`ξ̂ ≤ ξ_max`).
    pub admitted: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThresholdSelection {
    pub fit: TailFit,
    pub candidates: Vec<Candidate>,
    /// Index into `candidates` of the selected threshold.
    pub selected: Option<usize>,
}

/// Strict excesses over `u` taken from an ascending sample.
pub(crate) fn excesses_over(sorted: &[f64], u: f64) -> Vec<f64> {
    let start = sorted.partition_point(|x| *x <= u);
    sorted[start..].iter().map(|x| x - u).collect()
}

/// Threshold at rank `m`: midway between `X_(m)` and the next larger order
/// statistic, so the exceedances are exactly the values above `X_(m)` while
/// no observation sits on the threshold itself; `X_(m)` when nothing is larger.
pub(crate) fn candidate_threshold(sorted: &[f64], m: usize) -> f64 {
    let x = sorted[m - 1];
    match sorted[m..].iter().find(|v| **v > x) {
        Some(next) => x + 0.5 * (next - x),
        None => x,
    }
}

pub fn select_threshold(sample: &CostSample, config: &ThresholdConfig) -> TailFit {
    select_threshold_detailed(sample, config).fit
}

/// Automated threshold selection.
///
/// Candidates `u_i` are the empirical `q_i`-quantiles. A candidate enters
/// the admitted set `I` when its fitted shape is at most `ξ_max`; its
/// p-value comes from the Anderson-Darling table. ForwardStop is applied
/// to the p-values of `I` in ascending threshold order:
/// `W = {w : -(1/r_w) Σ_{r ≤ r_w} ln(1 - p_r) ≤ γ}` where `r_w` is the rank
/// of `w` within `I`. With `ŵ = max W`, the selected index is `max I` when
/// `ŵ = max I`, the next admitted index above `ŵ` otherwise, and `min I`
/// when `W` is empty.
pub fn select_threshold_detailed(sample: &CostSample, config: &ThresholdConfig) -> ThresholdSelection {
    let sorted = sample.sorted();
    let n = sorted.len();
    let mut candidates = Vec::with_capacity(config.quantile_levels.len());
    for &level in &config.quantile_levels {
        let u = candidate_threshold(&sorted, order_statistic_index(level, n));
        let excess = excesses_over(&sorted, u);
        let k = excess.len();
        let params = if k >= 2 { fit_gpd(&excess, config.fit_method).ok() } else { None };
        let mut cand = Candidate { level, u, k, params, a2: None, p_value: None, admitted: false };
        if let Some(p) = params.filter(|p| p.xi() <= config.xi_max) {
            let a2 = ad_statistic(&excess, &p);
            cand.a2 = Some(a2);
            cand.p_value = Some(ad_pvalue(a2, p.xi()));
            cand.admitted = true;
        }
        candidates.push(cand);
    }

    let admitted: Vec<usize> = (0..candidates.len()).filter(|&i| candidates[i].admitted).collect();
    let selected = if admitted.is_empty() {
        None
    } else {
        let mut running = 0.0;
        let mut w_hat = None;
        for (rank, &i) in admitted.iter().enumerate() {
            let p = candidates[i].p_value.unwrap_or(0.0);
            running -= ln_1p(-p);
            if running / (rank + 1) as f64 <= config.significance {
                w_hat = Some(rank);
            }
        }
        Some(match w_hat {
            None => admitted[0],
            Some(r) if r == admitted.len() - 1 => admitted[r],
            Some(r) => admitted[r + 1],
        })
    };

    let fit = match selected {
        Some(i) => {
            let c = &candidates[i];
            TailFit { u: c.u, params: c.params, fu_hat: (n - c.k) as f64 / n as f64, k: c.k }
        }
        None => {
            let c = &candidates[0];
            TailFit { u: c.u, params: None, fu_hat: (n - c.k) as f64 / n as f64, k: c.k }
        }
    };
    ThresholdSelection { fit, candidates, selected }
}
