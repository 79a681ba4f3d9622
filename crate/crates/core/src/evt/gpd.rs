use alloc::vec::Vec;

use rand::Rng;

use super::CostSample;
use crate::math::{exp, exp_m1, ln, ln_1p};
use crate::{Error, Result};

/// `|ξ|` below this uses the exponential branch of every GPD formula.
pub const XI_ZERO_TOL: f64 = 1e-12;

/// Generalized Pareto distribution with shape `xi` and scale `sigma > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GpdParams {
    xi: f64,
    sigma: f64,
}

impl GpdParams {
    pub fn new(xi: f64, sigma: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::InvalidParameter("GPD shape must be finite"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter("GPD scale must be positive and finite"));
        }
        Ok(Self { xi, sigma })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    fn is_exponential(&self) -> bool {
        self.xi.abs() < XI_ZERO_TOL
    }

    /// Right end of the support: `-σ/ξ` for `ξ < 0`, infinite otherwise.
    pub fn upper_endpoint(&self) -> f64 {
        if self.xi < 0.0 && !self.is_exponential() {
            -self.sigma / self.xi
        } else {
            f64::INFINITY
        }
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if x >= 0.0 && x <= self.upper_endpoint() {
            Ok(())
        } else {
            Err(Error::Domain { what: "x", value: x })
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.cdf_unchecked(x))
    }

    /// CDF extended by 0 below and 1 above the support.
    pub(crate) fn cdf_clamped(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= self.upper_endpoint() {
            1.0
        } else {
            self.cdf_unchecked(x)
        }
    }

    fn cdf_unchecked(&self, x: f64) -> f64 {
        let z = x / self.sigma;
        let v = if self.is_exponential() {
            -exp_m1(-z)
        } else {
            -exp_m1(-ln_1p(self.xi * z) / self.xi)
        };
        v.clamp(0.0, 1.0)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(exp(self.ln_pdf_unchecked(x)))
    }

    /// Log-density for `x` inside the support.
    pub(crate) fn ln_pdf_unchecked(&self, x: f64) -> f64 {
        let z = x / self.sigma;
        if self.is_exponential() {
            -ln(self.sigma) - z
        } else {
            -ln(self.sigma) - (1.0 / self.xi + 1.0) * ln_1p(self.xi * z)
        }
    }

    /// Quantile at `p ∈ [0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain { what: "p", value: p });
        }
        let tail = ln_1p(-p);
        Ok(if self.is_exponential() {
            -self.sigma * tail
        } else {
            (self.sigma / self.xi * exp_m1(-self.xi * tail)).min(self.upper_endpoint())
        })
    }

    /// `n` i.i.d. draws by inverse transform of `[0, 1)` uniforms.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<CostSample> {
        if n == 0 {
            return Err(Error::TooFewObservations { required: 1, actual: 0 });
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.random();
            out.push(self.quantile(u)?);
        }
        CostSample::new(out)
    }

    /// `σ/(1-ξ)` when `ξ < 1`.
    pub fn mean(&self) -> Option<f64> {
        (self.xi < 1.0).then(|| self.sigma / (1.0 - self.xi))
    }

    /// `σ²/((1-ξ)²(1-2ξ))` when `ξ < 1/2`.
    pub fn variance(&self) -> Option<f64> {
        (self.xi < 0.5).then(|| {
            let d = 1.0 - self.xi;
            self.sigma * self.sigma / (d * d * (1.0 - 2.0 * self.xi))
        })
    }
}
