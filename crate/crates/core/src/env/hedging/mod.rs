//! Delta-Gamma hedging of a short at-the-money call under exponential NIG
//! stock dynamics.
//!
//! Stock paths are simulated under the physical law; every price and Greek
//! uses the mean-corrected pricing law. The cost of an episode is the
//! terminal shortfall of the self-financing hedging portfolio.

mod bessel;
mod engine;
mod market;
mod nig;
mod table;

pub use bessel::{bessel_k1, bessel_k1e};
pub use engine::{EpisodeOutcome, HedgeConfig, HedgeEnv, PathDecomposition, PositionMode, SweepCurve};
pub use market::{Greeks, HedgeMarket, Measure};
pub use nig::{inverse_gaussian, NigParams};
pub use table::CdfTable;

use crate::evt::{FitMethod, ThresholdConfig};

pub const NAME: &str = "hedging";

/// Reference optimum of the default problem, from a brute-force sweep over
/// 10⁶ paths.
pub const THETA_STAR: f64 = 0.5991;
pub const J_STAR: f64 = 40.37;

/// Tail fits in this environment use the method of moments.
pub fn default_threshold_config() -> ThresholdConfig {
    ThresholdConfig::default().with_method(FitMethod::Mom)
}

#[cfg(test)]
mod tests;
