//! Market model and option pricing under the mean-correcting martingale measure.

use super::nig::NigParams;
use crate::math::{exp, ln, sqrt};
use crate::{Error, Result};

/// Physical and pricing NIG laws of weekly log-returns, the weekly rate and
/// the initial stock price.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct HedgeMarket {
    pub p_params: NigParams,
    pub q_params: NigParams,
    /// Continuously compounded rate per week.
    pub r: f64,
    pub s0: f64,
}

impl Default for HedgeMarket {
    /// Costly options: the pricing `δ` is four times the physical one.
    fn default() -> Self {
        let p = NigParams { a: 35.7, beta: -10.8, delta: 2.04e-2, mu: 6.7e-3 };
        Self { p_params: p, q_params: NigParams { delta: 4.0 * p.delta, ..p }, r: 0.02 / 52.0, s0: 1000.0 }
    }
}

/// Which of the two pricing laws a probability is taken under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Stock as numeraire: `β^Q + 1`.
    Share,
    /// Bond as numeraire: `β^Q`.
    Cash,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Greeks {
    pub price: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl HedgeMarket {
    pub fn validate(&self) -> Result<()> {
        self.p_params.validate()?;
        self.q_params.validate()?;
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter("rate must be finite"));
        }
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::InvalidParameter("initial stock price must be positive"));
        }
        self.zeta_q().map(|_| ())
    }

    /// Drift correction `ζ^Q = r - μ^Q + δ^Q(√(a² - (β+1)²) - √(a² - β²))`.
    pub fn zeta_q(&self) -> Result<f64> {
        let q = &self.q_params;
        let shifted = q.beta + 1.0;
        if !(shifted.abs() < q.a) {
            return Err(Error::InvalidParameter("pricing law needs |beta + 1| < a"));
        }
        Ok(self.r - q.mu + q.delta * (sqrt(q.a * q.a - shifted * shifted) - q.gamma()))
    }

    /// `NIG(a^Q, β^Q [+1], δ^Q τ, (μ^Q + ζ^Q)τ)`.
    pub fn pricing_law(&self, tau: f64, measure: Measure) -> Result<NigParams> {
        if !(tau > 0.0) {
            return Err(Error::Domain { what: "tau", value: tau });
        }
        let q = &self.q_params;
        let beta = match measure {
            Measure::Share => q.beta + 1.0,
            Measure::Cash => q.beta,
        };
        NigParams::new(q.a, beta, q.delta * tau, (q.mu + self.zeta_q()?) * tau)
    }

    fn check(spot: f64, tau: f64, strike: f64) -> Result<()> {
        if !(spot > 0.0) {
            return Err(Error::Domain { what: "spot", value: spot });
        }
        if !(strike > 0.0) {
            return Err(Error::Domain { what: "strike", value: strike });
        }
        if !(tau > 0.0) {
            return Err(Error::Domain { what: "tau", value: tau });
        }
        Ok(())
    }

    /// European call with `tau` weeks to maturity:
    /// `S(1 - Φ₁(ln(E/S))) - E e^{-rτ}(1 - Φ₀(ln(E/S)))`.
    pub fn call_price(&self, spot: f64, tau: f64, strike: f64) -> Result<f64> {
        Self::check(spot, tau, strike)?;
        let x = ln(strike / spot);
        let share = self.pricing_law(tau, Measure::Share)?;
        let cash = self.pricing_law(tau, Measure::Cash)?;
        Ok(spot * (1.0 - share.cdf(x)) - strike * exp(-self.r * tau) * (1.0 - cash.cdf(x)))
    }

    /// `∂Π/∂S = 1 - Φ₁(ln(E/S))`.
    pub fn call_delta(&self, spot: f64, tau: f64, strike: f64) -> Result<f64> {
        Self::check(spot, tau, strike)?;
        Ok(1.0 - self.pricing_law(tau, Measure::Share)?.cdf(ln(strike / spot)))
    }

    /// `∂²Π/∂S² = φ₁(ln(E/S))/S`.
    pub fn call_gamma(&self, spot: f64, tau: f64, strike: f64) -> Result<f64> {
        Self::check(spot, tau, strike)?;
        Ok(self.pricing_law(tau, Measure::Share)?.pdf(ln(strike / spot)) / spot)
    }

    pub fn greeks(&self, spot: f64, tau: f64, strike: f64) -> Result<Greeks> {
        Ok(Greeks {
            price: self.call_price(spot, tau, strike)?,
            delta: self.call_delta(spot, tau, strike)?,
            gamma: self.call_gamma(spot, tau, strike)?,
        })
    }
}
