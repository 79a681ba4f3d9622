use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::market::{HedgeMarket, Measure};
use super::table::CdfTable;
use crate::evt::{cvar_sa, CostSample, RiskLevel};
use crate::math::{exp, ln};
use crate::optimizer::{Environment, PolicyParams};
use crate::seed::mix_seed;
use crate::{Error, Result};

/// Remaining maturities at or below this are treated as expired.
const EXPIRED: f64 = 1e-12;

/// Contract and horizon of the hedging problem.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct HedgeConfig {
    /// Target option maturity `T` in weeks.
    pub maturity: usize,
    /// Maturity of each freshly purchased hedging option, in weeks.
    pub tau_h: f64,
    /// Target strike; `None` means at the money, `E = S₀`.
    pub strike: Option<f64>,
    pub level: RiskLevel,
    pub gamma_discount: f64,
}

impl Default for HedgeConfig {
    fn default() -> Self {
        Self {
            maturity: 26,
            tau_h: 5.2,
            strike: None,
            level: RiskLevel::new(0.999).expect("valid level"),
            gamma_discount: 1.0,
        }
    }
}

impl HedgeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.maturity == 0 {
            return Err(Error::InvalidParameter("maturity must be at least one week"));
        }
        if !(self.tau_h > 0.0 && self.tau_h.is_finite()) {
            return Err(Error::InvalidParameter("hedging option maturity must be positive"));
        }
        if let Some(e) = self.strike {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidParameter("strike must be positive"));
            }
        }
        if self.gamma_discount != 1.0 {
            return Err(Error::InvalidParameter("the terminal-cost problem is undiscounted"));
        }
        Ok(())
    }
}

/// Whether the portfolio trades or just accrues interest on its cash.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionMode {
    Policy,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOutcome {
    /// `max(0, S_T - E) - V_T`.
    pub shortfall: f64,
    pub terminal_value: f64,
    pub terminal_price: f64,
}

/// Terminal value split as `V_T = a + θ·b` along one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDecomposition {
    pub payoff: f64,
    pub a: f64,
    pub b: f64,
}

impl PathDecomposition {
    pub fn shortfall(&self, theta: f64) -> f64 {
        self.payoff - self.a - theta * self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepCurve {
    pub thetas: Vec<f64>,
    /// Sample-averaging CVaR of the shortfall at each θ.
    pub values: Vec<f64>,
    pub argmin: usize,
}

impl SweepCurve {
    pub fn theta_min(&self) -> f64 {
        self.thetas[self.argmin]
    }

    pub fn j_min(&self) -> f64 {
        self.values[self.argmin]
    }
}

/// Delta-Gamma hedging of a short call; θ is the fraction of the target
/// Gamma neutralized with an at-the-money hedging option.
#[derive(Debug, Clone)]
pub struct HedgeEnv {
    market: HedgeMarket,
    config: HedgeConfig,
    strike: f64,
    premium: f64,
    /// Share-measure tables for remaining maturities `1..=T` (index `τ - 1`).
    target: Vec<CdfTable>,
    /// Share and cash tables after one week of a hedging option's life.
    rolled: Option<(CdfTable, CdfTable)>,
    /// Hedging option Delta, density at the money, and price per unit spot
    /// at purchase.
    hedge_delta: f64,
    hedge_density: f64,
    hedge_price_ratio: f64,
}

impl HedgeEnv {
    pub fn new(market: HedgeMarket, config: HedgeConfig) -> Result<Self> {
        market.validate()?;
        config.validate()?;
        let strike = config.strike.unwrap_or(market.s0);
        let premium = market.call_price(market.s0, config.maturity as f64, strike)?;
        let target = (1..=config.maturity)
            .map(|tau| market.pricing_law(tau as f64, Measure::Share).map(CdfTable::new))
            .collect::<Result<Vec<_>>>()?;
        let remaining = config.tau_h - 1.0;
        let rolled = if remaining > EXPIRED {
            Some((
                CdfTable::new(market.pricing_law(remaining, Measure::Share)?),
                CdfTable::new(market.pricing_law(remaining, Measure::Cash)?),
            ))
        } else {
            None
        };
        let share_h = market.pricing_law(config.tau_h, Measure::Share)?;
        let cash_h = market.pricing_law(config.tau_h, Measure::Cash)?;
        let hedge_delta = 1.0 - share_h.cdf(0.0);
        let hedge_density = share_h.pdf(0.0);
        let hedge_price_ratio = hedge_delta - exp(-market.r * config.tau_h) * (1.0 - cash_h.cdf(0.0));
        Ok(Self {
            market,
            config,
            strike,
            premium,
            target,
            rolled,
            hedge_delta,
            hedge_density,
            hedge_price_ratio,
        })
    }

    pub fn market(&self) -> &HedgeMarket {
        &self.market
    }

    pub fn config(&self) -> &HedgeConfig {
        &self.config
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    /// `V₀ = Π(0, T, E)` at spot `S₀`.
    pub fn premium(&self) -> f64 {
        self.premium
    }

    /// Target Delta and Gamma at week `t` and spot `s`.
    fn target_greeks(&self, t: usize, s: f64) -> (f64, f64) {
        let table = &self.target[self.config.maturity - t - 1];
        let x = ln(self.strike / s);
        (1.0 - table.cdf(x), table.pdf(x) / s)
    }

    /// Hedging option Delta and Gamma at purchase (strike equals spot).
    pub fn hedge_greeks(&self, s: f64) -> (f64, f64) {
        (self.hedge_delta, self.hedge_density / s)
    }

    /// `H^beg_t`, the purchase price of the at-the-money hedging option.
    pub fn hedge_price(&self, s: f64) -> f64 {
        s * self.hedge_price_ratio
    }

    /// `H^end_{t+1}`: the option bought at strike `s_prev` revalued a week
    /// later at spot `s_next`.
    pub fn rolled_price(&self, s_prev: f64, s_next: f64) -> f64 {
        match &self.rolled {
            Some((share, cash)) => {
                let x = ln(s_prev / s_next);
                let remaining = self.config.tau_h - 1.0;
                s_next * (1.0 - share.cdf(x)) - s_prev * exp(-self.market.r * remaining) * (1.0 - cash.cdf(x))
            }
            None => (s_next - s_prev).max(0.0),
        }
    }

    /// `(ψ^(S), ψ^(O))` for hedge ratio θ at week `t < T` and spot `s`.
    pub fn positions(&self, theta: f64, t: usize, s: f64) -> Result<(f64, f64)> {
        if t >= self.config.maturity {
            return Err(Error::Domain { what: "t", value: t as f64 });
        }
        if !(s > 0.0) {
            return Err(Error::Domain { what: "spot", value: s });
        }
        Ok(self.positions_unchecked(theta, t, s))
    }

    fn positions_unchecked(&self, theta: f64, t: usize, s: f64) -> (f64, f64) {
        let (delta_t, gamma_t) = self.target_greeks(t, s);
        let (delta_h, gamma_h) = self.hedge_greeks(s);
        let psi_o = theta * gamma_t / gamma_h;
        (delta_t - psi_o * delta_h, psi_o)
    }

    /// Weekly physical log-returns of episode `episode` under `seed`.
    pub fn sample_returns(&self, seed: u64, episode: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, episode));
        self.market.p_params.sample(self.config.maturity, &mut rng)
    }

    /// Self-financing portfolio along a given return path:
    /// `V_{t+1} = (V_t - ψ^(S)S_t - ψ^(O)H^beg_t)e^r + ψ^(S)S_{t+1} + ψ^(O)H^end_{t+1}`.
    pub fn simulate_path(&self, returns: &[f64], theta: f64, mode: PositionMode) -> Result<EpisodeOutcome> {
        if returns.len() != self.config.maturity {
            return Err(Error::LengthMismatch(self.config.maturity, returns.len()));
        }
        if let Some(i) = returns.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let growth = exp(self.market.r);
        let mut s = self.market.s0;
        let mut v = self.premium;
        for (t, z) in returns.iter().enumerate() {
            let s_next = s * exp(*z);
            let (psi_s, psi_o) = match mode {
                PositionMode::Policy => self.positions_unchecked(theta, t, s),
                PositionMode::Flat => (0.0, 0.0),
            };
            let h_beg = self.hedge_price(s);
            let h_end = self.rolled_price(s, s_next);
            v = (v - psi_s * s - psi_o * h_beg) * growth + psi_s * s_next + psi_o * h_end;
            s = s_next;
        }
        Ok(EpisodeOutcome { shortfall: (s - self.strike).max(0.0) - v, terminal_value: v, terminal_price: s })
    }

    /// Affine split of the terminal value in θ along a given path.
    pub fn decompose(&self, returns: &[f64]) -> Result<PathDecomposition> {
        if returns.len() != self.config.maturity {
            return Err(Error::LengthMismatch(self.config.maturity, returns.len()));
        }
        let growth = exp(self.market.r);
        let mut s = self.market.s0;
        let (mut a, mut b) = (self.premium, 0.0);
        for (t, z) in returns.iter().enumerate() {
            let s_next = s * exp(*z);
            let (delta_t, gamma_t) = self.target_greeks(t, s);
            let (delta_h, gamma_h) = self.hedge_greeks(s);
            let ratio = gamma_t / gamma_h;
            let stock_gain = s_next - s * growth;
            let option_gain = self.rolled_price(s, s_next) - self.hedge_price(s) * growth;
            a = a * growth + delta_t * stock_gain;
            b = b * growth + ratio * (option_gain - delta_h * stock_gain);
            s = s_next;
        }
        Ok(PathDecomposition { payoff: (s - self.strike).max(0.0), a, b })
    }

    /// `n_paths` common paths shared by every θ in `thetas`; returns the
    /// sample-averaging CVaR curve at the configured level.
    pub fn brute_force_curve(&self, thetas: &[f64], n_paths: usize, seed: u64) -> Result<SweepCurve> {
        if thetas.is_empty() {
            return Err(Error::InvalidParameter("theta grid is empty"));
        }
        if n_paths == 0 {
            return Err(Error::TooFewObservations { required: 1, actual: 0 });
        }
        let paths = (0..n_paths as u64)
            .map(|i| self.decompose(&self.sample_returns(seed, i)))
            .collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(thetas.len());
        for &theta in thetas {
            let costs = CostSample::new(paths.iter().map(|p| p.shortfall(theta)).collect())?;
            values.push(cvar_sa(&costs, self.config.level).value);
        }
        let argmin = (0..values.len()).fold(0, |best, i| if values[i] < values[best] { i } else { best });
        Ok(SweepCurve { thetas: thetas.to_vec(), values, argmin })
    }
}

impl Environment for HedgeEnv {
    fn dim(&self) -> usize {
        1
    }

    /// Episode `i` draws its returns from substream `mix_seed(seed, i)`, so
    /// paths depend on the seed alone and never on θ.
    fn sample_costs(&self, theta: &PolicyParams, n: usize, seed: u64) -> Result<CostSample> {
        if theta.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, actual: theta.dim() });
        }
        if n == 0 {
            return Err(Error::TooFewObservations { required: 1, actual: 0 });
        }
        let th = theta.as_slice()[0];
        let costs = (0..n as u64)
            .map(|i| self.simulate_path(&self.sample_returns(seed, i), th, PositionMode::Policy).map(|o| o.shortfall))
            .collect::<Result<Vec<_>>>()?;
        CostSample::new(costs)
    }
}
