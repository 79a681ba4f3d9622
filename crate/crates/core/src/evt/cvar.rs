//! Empirical and peaks-over-threshold VaR/CVaR estimators.

use super::fit::fit_gpd;
use super::gpd::XI_ZERO_TOL;
use super::sample::order_statistic_index;
use super::threshold::{excesses_over, select_threshold};
use super::{CostSample, RiskLevel, TailFit, ThresholdConfig};
use crate::math::{exp_m1, ln};
use crate::{Error, Result};

/// CVaR estimator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Estimator {
    /// Peaks over threshold.
    #[default]
    Pot,
    /// Sample averaging over the empirical tail.
    Sa,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Pot => "pot",
            Estimator::Sa => "sa",
        }
    }
}

impl core::str::FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pot" | "POT" => Ok(Estimator::Pot),
            "sa" | "SA" => Ok(Estimator::Sa),
            _ => Err(Error::InvalidParameter("estimator must be `pot` or `sa`")),
        }
    }
}

/// Quantities behind a POT estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PotBreakdown {
    pub u: f64,
    /// `s = (1 - F̂(u))/(1 - α)`.
    pub s: f64,
    pub xi: f64,
    pub sigma: f64,
    pub k: usize,
    pub fu_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CvarEstimate {
    pub value: f64,
    pub method: Estimator,
    pub breakdown: Option<PotBreakdown>,
}

/// Empirical VaR: the order statistic `X_(⌈αn⌉)`.
pub fn var_empirical(sample: &CostSample, level: RiskLevel) -> f64 {
    let sorted = sample.sorted();
    sorted[order_statistic_index(level.alpha(), sorted.len()) - 1]
}

/// Sample-averaging CVaR: mean of every `X_i ≥ X_(⌈αn⌉)`.
pub fn cvar_sa(sample: &CostSample, level: RiskLevel) -> CvarEstimate {
    let sorted = sample.sorted();
    let q = sorted[order_statistic_index(level.alpha(), sorted.len()) - 1];
    let start = sorted.partition_point(|x| *x < q);
    let tail = &sorted[start..];
    CvarEstimate {
        value: tail.iter().sum::<f64>() / tail.len() as f64,
        method: Estimator::Sa,
        breakdown: None,
    }
}

/// POT CVaR from a tail fit:
/// `u + σ/(1-ξ)·(1 + (s^ξ - 1)/ξ)`, or `u + σ(ln s + 1)` when `ξ = 0`.
///
/// Requires a non-fallback fit, `ξ < 1` and `α ≥ F̂(u)`.
pub fn cvar_pot(fit: &TailFit, level: RiskLevel) -> Result<CvarEstimate> {
    let params = fit.params.ok_or(Error::PotUnavailable("threshold selection fell back"))?;
    let (xi, sigma) = (params.xi(), params.sigma());
    if xi >= 1.0 {
        return Err(Error::PotUnavailable("shape ≥ 1 gives an infinite tail mean"));
    }
    if !(fit.fu_hat < 1.0) {
        return Err(Error::PotUnavailable("no exceedances above the threshold"));
    }
    let alpha = level.alpha();
    if alpha < fit.fu_hat {
        return Err(Error::PotUnavailable("risk level lies below the threshold level"));
    }
    let s = (1.0 - fit.fu_hat) / (1.0 - alpha);
    let value = if xi.abs() < XI_ZERO_TOL {
        fit.u + sigma * (ln(s) + 1.0)
    } else {
        fit.u + sigma / (1.0 - xi) * (1.0 + exp_m1(xi * ln(s)) / xi)
    };
    Ok(CvarEstimate {
        value,
        method: Estimator::Pot,
        breakdown: Some(PotBreakdown { u: fit.u, s, xi, sigma, k: fit.k, fu_hat: fit.fu_hat }),
    })
}

/// POT CVaR with sample-averaging fallback; never fails.
///
/// Without `fixed_u` the threshold comes from automated selection. With
/// `fixed_u` a GPD is fitted to the excesses over it directly; fewer than two
/// excesses or `ξ̂ > ξ_max` fall back to sample averaging.
pub fn estimate_cvar(
    sample: &CostSample,
    level: RiskLevel,
    config: &ThresholdConfig,
    fixed_u: Option<f64>,
) -> CvarEstimate {
    let fit = match fixed_u {
        None => select_threshold(sample, config),
        Some(u) => {
            let sorted = sample.sorted();
            let excess = excesses_over(&sorted, u);
            let n = sorted.len();
            let k = excess.len();
            let params = if k >= 2 {
                fit_gpd(&excess, config.fit_method).ok().filter(|p| p.xi() <= config.xi_max)
            } else {
                None
            };
            TailFit { u, params, fu_hat: (n - k) as f64 / n as f64, k }
        }
    };
    cvar_pot(&fit, level).unwrap_or_else(|_| cvar_sa(sample, level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evt::{FitMethod, GpdParams};
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn level(a: f64) -> RiskLevel {
        RiskLevel::new(a).unwrap()
    }

    fn one_to_ten() -> CostSample {
        CostSample::new((1..=10).map(f64::from).collect()).unwrap()
    }

    fn fit(u: f64, xi: f64, sigma: f64, fu: f64) -> TailFit {
        TailFit { u, params: Some(GpdParams::new(xi, sigma).unwrap()), fu_hat: fu, k: 100 }
    }

    #[test]
    fn var_examples() {
        assert_eq!(var_empirical(&one_to_ten(), level(0.9)), 9.0);
        assert_eq!(var_empirical(&CostSample::new(vec![5.0]).unwrap(), level(0.3)), 5.0);
        assert_eq!(var_empirical(&CostSample::new(vec![3.0, 1.0, 2.0]).unwrap(), level(0.5)), 2.0);
    }

    #[test]
    fn sa_examples() {
        assert_eq!(cvar_sa(&one_to_ten(), level(0.8)).value, 9.0);
        assert_eq!(cvar_sa(&CostSample::new(vec![4.5; 7]).unwrap(), level(0.99)).value, 4.5);
        assert_eq!(cvar_sa(&one_to_ten(), level(0.05)).value, 5.5);
        assert_eq!(cvar_sa(&one_to_ten(), level(0.8)).method, Estimator::Sa);
    }

    #[test]
    fn pot_exponential_branch() {
        let e = cvar_pot(&fit(10.0, 0.0, 2.0, 0.9), level(0.998)).unwrap();
        let b = e.breakdown.unwrap();
        assert!((b.s - 50.0).abs() < 1e-9);
        assert!((e.value - (10.0 + 2.0 * (libm::log(50.0) + 1.0))).abs() < 1e-9);
        assert!((e.value - 19.824).abs() < 1e-3);
    }

    #[test]
    fn pot_at_own_threshold() {
        for &xi in &[0.1, 0.4, 0.75, 0.95] {
            let e = cvar_pot(&fit(3.0, xi, 1.3, 0.99), level(0.99)).unwrap();
            assert!((e.breakdown.unwrap().s - 1.0).abs() < 1e-12);
            assert!((e.value - (3.0 + 1.3 / (1.0 - xi))).abs() < 1e-10);
        }
    }

    #[test]
    fn pot_exact_gpd_tail() {
        // X ~ GPD(0.4, 2): excesses over u are GPD(0.4, 2 + 0.4u)
        let g = GpdParams::new(0.4, 2.0).unwrap();
        let u = g.quantile(0.998).unwrap();
        let e = cvar_pot(&fit(u, 0.4, 2.0 + 0.4 * u, 0.998), level(0.998)).unwrap();
        let closed = 2.0 / 0.6 * (1.0 + (libm::pow(0.002, -0.4) - 1.0) / 0.4);
        assert!((e.value - closed).abs() < 1e-6);
        assert!((closed - 95.094).abs() < 1e-3);
        // lower threshold, same exact tail
        let u = 5.0;
        let fu = g.cdf(u).unwrap();
        let e = cvar_pot(&fit(u, 0.4, 2.0 + 0.4 * u, fu), level(0.998)).unwrap();
        assert!((e.value - closed).abs() < 1e-6);
    }

    #[test]
    fn pot_small_shape_matches_exponential_limit() {
        let a = cvar_pot(&fit(1.0, 1e-8, 2.0, 0.9), level(0.999)).unwrap().value;
        let b = cvar_pot(&fit(1.0, 0.0, 2.0, 0.9), level(0.999)).unwrap().value;
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn pot_preconditions() {
        let fb = TailFit { u: 1.0, params: None, fu_hat: 0.5, k: 3 };
        assert!(cvar_pot(&fb, level(0.99)).is_err());
        assert!(cvar_pot(&fit(1.0, 1.0, 1.0, 0.9), level(0.99)).is_err());
        assert!(cvar_pot(&fit(1.0, 0.2, 1.0, 0.995), level(0.99)).is_err());
    }

    #[test]
    fn estimate_falls_back() {
        let cfg = ThresholdConfig::default();
        // the lowest candidate already sits on the maximum: no excesses anywhere
        let tiny = CostSample::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(estimate_cvar(&tiny, level(0.998), &cfg, None).method, Estimator::Sa);
        let small = CostSample::new((1..=10).map(f64::from).collect()).unwrap();
        assert_eq!(estimate_cvar(&small, level(0.9), &cfg, Some(100.0)).method, Estimator::Sa);
        let e = estimate_cvar(&small, level(0.9), &cfg, Some(100.0));
        assert_eq!(e.value, cvar_sa(&small, level(0.9)).value);
    }

    #[test]
    fn estimate_fixed_threshold_uses_it() {
        let g = GpdParams::new(0.3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = g.sample(5000, &mut rng).unwrap();
        let cfg = ThresholdConfig::default().with_method(FitMethod::Mom);
        let e = estimate_cvar(&s, level(0.998), &cfg, Some(2.0));
        assert_eq!(e.method, Estimator::Pot);
        assert_eq!(e.breakdown.unwrap().u, 2.0);
    }

    #[test]
    fn pot_beats_sa_most_of_the_time() {
        let g = GpdParams::new(0.4, 2.0).unwrap();
        let truth = 2.0 / 0.6 * (1.0 + (libm::pow(0.002, -0.4) - 1.0) / 0.4);
        let cfg = ThresholdConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (mut wins, mut se_pot, mut se_sa) = (0, 0.0, 0.0);
        for _ in 0..100 {
            let s = g.sample(10_000, &mut rng).unwrap();
            let pot = estimate_cvar(&s, level(0.998), &cfg, None).value;
            let sa = cvar_sa(&s, level(0.998)).value;
            if (pot - truth).abs() < (sa - truth).abs() {
                wins += 1;
            }
            se_pot += (pot - truth) * (pot - truth);
            se_sa += (sa - truth) * (sa - truth);
        }
        // the win probability is about 0.68 at this size
        assert!(wins >= 55, "POT closer in {wins}/100");
        assert!(se_pot < se_sa, "{se_pot} vs {se_sa}");
    }

    proptest! {
        #[test]
        fn sa_dominates_var(values in proptest::collection::vec(-1e3f64..1e3, 1..200), a in 0.001f64..0.999) {
            let s = CostSample::new(values).unwrap();
            let l = level(a);
            prop_assert!(cvar_sa(&s, l).value >= var_empirical(&s, l) - 1e-9);
        }

        #[test]
        fn estimate_is_total(values in proptest::collection::vec(0.0f64..1e4, 1..300), a in 0.5f64..0.9999) {
            let s = CostSample::new(values).unwrap();
            let e = estimate_cvar(&s, level(a), &ThresholdConfig::default(), None);
            prop_assert!(e.value.is_finite());
            if e.method == Estimator::Pot {
                prop_assert!(e.breakdown.unwrap().s >= 1.0);
            }
            let v: Vec<f64> = s.values().to_vec();
            let fixed = estimate_cvar(&s, level(a), &ThresholdConfig::default(), Some(v[0]));
            prop_assert!(fixed.value.is_finite());
        }
    }
}
