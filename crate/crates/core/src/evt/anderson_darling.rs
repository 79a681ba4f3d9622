//! Anderson-Darling goodness-of-fit statistic for fitted GPD excesses.

use super::ad_table::{AD_CRITICAL, AD_LEVELS, AD_XI};
use super::GpdParams;
use crate::math::ln;

/// Smallest p-value reported by [`ad_pvalue`].
pub const AD_P_MIN: f64 = AD_LEVELS[AD_LEVELS.len() - 1];
/// Largest p-value reported by [`ad_pvalue`].
pub const AD_P_MAX: f64 = AD_LEVELS[0];

/// `A² = -k - (1/k) Σ_j (2j-1)[ln Z_(j) + ln(1 - Z_(k+1-j))]` with
/// `Z_(j) = G(Y_(j))`.
///
/// The transformed values are clamped to `[ε, 1-ε]` so boundary fits still
/// give a finite statistic.
pub fn ad_statistic(excesses: &[f64], params: &GpdParams) -> f64 {
    let k = excesses.len();
    if k == 0 {
        return 0.0;
    }
    let mut z: alloc::vec::Vec<f64> = excesses
        .iter()
        .map(|&y| params.cdf_clamped(y).clamp(f64::EPSILON, 1.0 - f64::EPSILON))
        .collect();
    z.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    for j in 0..k {
        let weight = (2 * j + 1) as f64;
        acc += weight * (ln(z[j]) + ln(1.0 - z[k - 1 - j]));
    }
    -(k as f64) - acc / k as f64
}

/// Upper-tail p-value of `a2` for a GPD fit with shape `xi`.
///
/// Critical values are interpolated linearly in `xi` between table rows and
/// the p-value linearly between bracketing critical values. Outside the table
/// the result is clamped to `[AD_P_MIN, AD_P_MAX]`; `xi` is clamped to the
/// tabulated range.
pub fn ad_pvalue(a2: f64, xi: f64) -> f64 {
    if a2.is_nan() {
        return AD_P_MIN;
    }
    let xi = xi.clamp(AD_XI[0], AD_XI[AD_XI.len() - 1]);
    let row = AD_XI.windows(2).position(|w| xi <= w[1]).unwrap_or(AD_XI.len() - 2);
    let (x0, x1) = (AD_XI[row], AD_XI[row + 1]);
    let t = if x1 > x0 { (xi - x0) / (x1 - x0) } else { 0.0 };
    let mut crit = [0.0; AD_LEVELS.len()];
    for (j, c) in crit.iter_mut().enumerate() {
        *c = AD_CRITICAL[row][j] + t * (AD_CRITICAL[row + 1][j] - AD_CRITICAL[row][j]);
    }
    if a2 <= crit[0] {
        return AD_P_MAX;
    }
    for j in 0..crit.len() - 1 {
        if a2 < crit[j + 1] {
            let w = (a2 - crit[j]) / (crit[j + 1] - crit[j]);
            return AD_LEVELS[j] + w * (AD_LEVELS[j + 1] - AD_LEVELS[j]);
        }
    }
    AD_P_MIN
}
