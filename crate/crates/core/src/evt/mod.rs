//! Extreme-value tail estimation.
//!
//! Generalized Pareto distribution (GPD) functions and fits, the empirical
//! (sample-averaging) VaR/CVaR, Anderson-Darling based automated threshold
//! selection and the peaks-over-threshold CVaR estimator built on them.

mod anderson_darling;
mod ad_table;
mod cvar;
mod fit;
mod gpd;
mod sample;
mod threshold;

pub use anderson_darling::{ad_pvalue, ad_statistic, AD_P_MAX, AD_P_MIN};
pub use cvar::{cvar_pot, cvar_sa, estimate_cvar, var_empirical, CvarEstimate, Estimator, PotBreakdown};
pub use fit::{fit_gpd, fit_gpd_mle, fit_gpd_mom, gpd_log_likelihood, FitMethod, MLE_XI_MAX, MLE_XI_MIN};
pub use gpd::{GpdParams, XI_ZERO_TOL};
pub use sample::{order_statistic_index, CostSample, RiskLevel};
pub use threshold::{select_threshold, select_threshold_detailed, Candidate, TailFit, ThresholdConfig, ThresholdSelection};
