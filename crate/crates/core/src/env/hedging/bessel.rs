//! Modified Bessel function of the second kind, order one.

use crate::math::{abs, exp, ln, sqrt};
use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX: f64 = 2.0;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// `K₁(x)` for `x > 0`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain { what: "x", value: x });
    }
    Ok(if x <= SERIES_MAX { k1_series(x) } else { k1e_cf2(x) * exp(-x) })
}

/// Exponentially scaled `eˣ·K₁(x)` for `x > 0`; finite for large `x`.
pub fn bessel_k1e(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain { what: "x", value: x });
    }
    Ok(if x <= SERIES_MAX { k1_series(x) * exp(x) } else { k1e_cf2(x) })
}

/// Ascending series
/// `K₁(x) = 1/x + ln(x/2)·I₁(x) - (x/4)·Σ (ψ(k+1) + ψ(k+2))·(x²/4)^k / (k!(k+1)!)`.
fn k1_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let log_half = ln(0.5 * x);
    // term_k = (x²/4)^k / (k!(k+1)!)
    let mut term = 1.0;
    let mut psi_a = -EULER_GAMMA; // ψ(k+1)
    let mut psi_b = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut i1 = 0.0;
    let mut digamma_sum = 0.0;
    for k in 0..MAX_ITER {
        i1 += term;
        digamma_sum += (psi_a + psi_b) * term;
        let kf = k as f64;
        psi_a += 1.0 / (kf + 1.0);
        psi_b += 1.0 / (kf + 2.0);
        term *= y / ((kf + 1.0) * (kf + 2.0));
        if term < EPS * i1 {
            break;
        }
    }
    1.0 / x + log_half * 0.5 * x * i1 - 0.25 * x * digamma_sum
}

/// Steed's continued fraction CF2 (Temme normalization) at order zero,
/// returning `eˣ·K₁(x)`.
fn k1e_cf2(x: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if abs(dels / s) < EPS {
            break;
        }
    }
    h *= a1;
    let k0e = sqrt(core::f64::consts::PI / (2.0 * x)) / s;
    k0e * (x + 0.5 - h) / x
}
