//! Controlled environment: the cost is `GPD(ξ, ς(θ))` with
//! `ς(θ) = (θ - ϑ)² + b`, so the CVaR is known in closed form and minimized
//! at `θ = ϑ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::evt::{CostSample, GpdParams, RiskLevel, XI_ZERO_TOL};
use crate::math::{exp_m1, ln_1p};
use crate::optimizer::{Environment, PolicyParams};
use crate::{Error, Result};

pub const NAME: &str = "gpd";

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct GpdEnvConfig {
    /// Optimum location `ϑ`.
    pub vartheta: f64,
    /// Scale floor `b`.
    pub b: f64,
    pub xi: f64,
    pub gamma_discount: f64,
}

impl Default for GpdEnvConfig {
    fn default() -> Self {
        Self { vartheta: 0.4, b: 2.0, xi: 0.4, gamma_discount: 1.0 }
    }
}

impl GpdEnvConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.vartheta.is_finite() {
            return Err(Error::InvalidParameter("vartheta must be finite"));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter("b must be positive"));
        }
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(Error::InvalidParameter("xi must lie in (0, 1)"));
        }
        if !(self.gamma_discount > 0.0 && self.gamma_discount <= 1.0) {
            return Err(Error::InvalidParameter("gamma_discount must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn scale_of(&self, theta: f64) -> f64 {
        let d = theta - self.vartheta;
        d * d + self.b
    }

    /// `(ς/(1-ξ))·(1 + ((1-α)^(-ξ) - 1)/ξ)`, the CVaR of `GPD(ξ, ς(θ))`.
    pub fn cvar_closed_form(&self, theta: f64, level: RiskLevel) -> f64 {
        gpd_cvar(self.xi, self.scale_of(theta), level)
    }
}

/// CVaR of `GPD(ξ, ς)` at level `α`, with the `ξ → 0` limit `ς(1 + ln(1/(1-α)))`.
pub fn gpd_cvar(xi: f64, scale: f64, level: RiskLevel) -> f64 {
    let ln_s = -ln_1p(-level.alpha());
    if xi.abs() < XI_ZERO_TOL {
        scale * (ln_s + 1.0)
    } else {
        scale / (1.0 - xi) * (1.0 + exp_m1(xi * ln_s) / xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpdEnv {
    config: GpdEnvConfig,
}

impl GpdEnv {
    pub fn new(config: GpdEnvConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &GpdEnvConfig {
        &self.config
    }

    pub fn theta_star(&self) -> f64 {
        self.config.vartheta
    }

    /// `J(ϑ)`, the optimal objective value.
    pub fn j_star(&self, level: RiskLevel) -> f64 {
        self.config.gamma_discount * self.config.cvar_closed_form(self.config.vartheta, level)
    }
}

impl Environment for GpdEnv {
    fn dim(&self) -> usize {
        1
    }

    /// One-step episodes: each cost is a single GPD draw.
    fn sample_costs(&self, theta: &PolicyParams, n: usize, seed: u64) -> Result<CostSample> {
        if theta.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, actual: theta.dim() });
        }
        let scale = self.config.scale_of(theta.as_slice()[0]);
        let law = GpdParams::new(self.config.xi, scale)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = law.sample(n, &mut rng)?;
        if self.config.gamma_discount == 1.0 {
            return Ok(sample);
        }
        let g = self.config.gamma_discount;
        CostSample::new(sample.into_values().into_iter().map(|x| g * x).collect())
    }
}
