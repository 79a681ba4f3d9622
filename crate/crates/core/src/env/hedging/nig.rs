//! Normal-inverse Gaussian distribution.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::bessel::bessel_k1e;
use crate::math::{exp, sqrt};
use crate::numeric::integrate;
use crate::{Error, Result};

/// Density below which the CDF quadrature truncates the tails.
const TAIL_CUT: f64 = 1e-17;
const CDF_ABS_TOL: f64 = 1e-13;
const CDF_MAX_INTERVALS: usize = 4000;

/// `NIG(a, β, δ, μ)` with `a > |β|` and `δ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct NigParams {
    pub a: f64,
    pub beta: f64,
    pub delta: f64,
    pub mu: f64,
}

impl NigParams {
    pub fn new(a: f64, beta: f64, delta: f64, mu: f64) -> Result<Self> {
        let p = Self { a, beta, delta, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.a, self.beta, self.delta, self.mu].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("NIG parameters must be finite"));
        }
        if !(self.a > self.beta.abs()) {
            return Err(Error::InvalidParameter("NIG requires a > |beta|"));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParameter("NIG requires delta > 0"));
        }
        Ok(())
    }

    /// `√(a² - β²)`.
    pub fn gamma(&self) -> f64 {
        sqrt(self.a * self.a - self.beta * self.beta)
    }

    pub fn mean(&self) -> f64 {
        self.mu + self.delta * self.beta / self.gamma()
    }

    pub fn variance(&self) -> f64 {
        let g = self.gamma();
        self.delta * self.a * self.a / (g * g * g)
    }

    /// `ln E[e^{uZ}] = μu + δ(√(a² - β²) - √(a² - (β + u)²))` for `|β + u| < a`.
    pub fn log_mgf(&self, u: f64) -> Result<f64> {
        let shifted = self.beta + u;
        if !(shifted.abs() < self.a) {
            return Err(Error::Domain { what: "u", value: u });
        }
        Ok(self.mu * u + self.delta * (self.gamma() - sqrt(self.a * self.a - shifted * shifted)))
    }

    /// Convolution power: the law of a sum of `tau` i.i.d. copies, `NIG(a, β, τδ, τμ)`.
    pub fn scaled(&self, tau: f64) -> Result<Self> {
        Self::new(self.a, self.beta, self.delta * tau, self.mu * tau)
    }

    /// `(aδ/π)·e^{δγ + β(x-μ)}·K₁(a√(δ² + (x-μ)²))/√(δ² + (x-μ)²)`.
    pub fn pdf(&self, x: f64) -> f64 {
        let dx = x - self.mu;
        let rho = sqrt(self.delta * self.delta + dx * dx);
        let arg = self.a * rho;
        let k1e = bessel_k1e(arg).unwrap_or(0.0);
        self.a * self.delta / core::f64::consts::PI
            * exp(self.delta * self.gamma() + self.beta * dx - arg)
            * k1e
            / rho
    }

    /// Point beyond which the density in direction `dir` stays below the cut.
    fn tail_point(&self, dir: f64) -> f64 {
        let sd = sqrt(self.variance());
        let mut k = 8.0;
        loop {
            let x = self.mean() + dir * k * sd;
            if self.pdf(x) < TAIL_CUT || k > 1e6 {
                return x;
            }
            k *= 2.0;
        }
    }

    /// CDF by adaptive quadrature of the density, integrating from whichever
    /// truncated tail is closer to `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let m = self.mean();
        let f = |t: f64| self.pdf(t);
        if x <= m {
            let lo = self.tail_point(-1.0);
            if x <= lo {
                return 0.0;
            }
            integrate(f, lo, x, CDF_ABS_TOL, 1e-14, CDF_MAX_INTERVALS).clamp(0.0, 1.0)
        } else {
            let hi = self.tail_point(1.0);
            if x >= hi {
                return 1.0;
            }
            (1.0 - integrate(f, x, hi, CDF_ABS_TOL, 1e-14, CDF_MAX_INTERVALS)).clamp(0.0, 1.0)
        }
    }

    /// Quantile by bracketing and Brent root finding on the CDF.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain { what: "p", value: p });
        }
        let (lo, hi) = (self.tail_point(-1.0), self.tail_point(1.0));
        crate::numeric::brent_root(|x| self.cdf(x) - p, lo, hi, 1e-14, 400)
            .ok_or(Error::FitFailed("NIG quantile bracket"))
    }

    /// One draw as a normal variance-mean mixture: `W ~ IG(δ/γ, δ²)`,
    /// `Z = μ + βW + √W·N`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let w = inverse_gaussian(self.delta / self.gamma(), self.delta * self.delta, rng);
        let n: f64 = rng.sample(StandardNormal);
        self.mu + self.beta * w + sqrt(w) * n
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

/// Inverse Gaussian draw with mean `m` and shape `lambda` by the
/// transformation-with-rejection method of Michael, Schucany and Haas.
pub fn inverse_gaussian<R: Rng + ?Sized>(m: f64, lambda: f64, rng: &mut R) -> f64 {
    let n: f64 = rng.sample(StandardNormal);
    let q = m * n * n;
    // m + m/(2λ)·(q - √(q² + 4λq)) without the cancellation
    let x = m * (1.0 - 2.0 * q / (q + sqrt(q * (q + 4.0 * lambda))));
    let u: f64 = rng.random();
    if u * (m + x) <= m {
        x
    } else {
        m * m / x
    }
}
