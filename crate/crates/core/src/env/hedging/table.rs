//! Tabulated NIG CDF on a log-moneyness grid with cubic Hermite interpolation.

use alloc::vec::Vec;

use super::nig::NigParams;
use crate::math::floor;
use crate::numeric::kronrod15;

pub const GRID_LO: f64 = -1.5;
pub const GRID_HI: f64 = 1.5;
pub const GRID_STEPS: usize = 1500;

/// CDF and density of one NIG law at equally spaced nodes. The density
/// doubles as the exact derivative for Hermite interpolation, and points
/// off the grid are evaluated by direct quadrature.
#[derive(Debug, Clone)]
pub struct CdfTable {
    law: NigParams,
    lo: f64,
    step: f64,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl CdfTable {
    pub fn new(law: NigParams) -> Self {
        Self::with_grid(law, GRID_LO, GRID_HI, GRID_STEPS)
    }

    pub fn with_grid(law: NigParams, lo: f64, hi: f64, steps: usize) -> Self {
        let step = (hi - lo) / steps as f64;
        let nodes: Vec<f64> = (0..=steps).map(|i| lo + step * i as f64).collect();
        let pdf: Vec<f64> = nodes.iter().map(|&x| law.pdf(x)).collect();
        let mut f = |x: f64| law.pdf(x);
        let mut cdf = Vec::with_capacity(steps + 1);
        let mut acc = law.cdf(lo);
        cdf.push(acc);
        for w in nodes.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            acc += kronrod15(&mut f, w[0], mid).0 + kronrod15(&mut f, mid, w[1]).0;
            cdf.push(acc);
        }
        // anchor the upper end on the complementary tail integral and spread
        // the accumulated drift linearly
        let drift = acc - law.cdf(hi);
        for (i, c) in cdf.iter_mut().enumerate() {
            *c = (*c - drift * i as f64 / steps as f64).clamp(0.0, 1.0);
        }
        Self { law, lo, step, cdf, pdf }
    }

    pub fn law(&self) -> &NigParams {
        &self.law
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let pos = (x - self.lo) / self.step;
        let last = self.cdf.len() - 1;
        if !(pos >= 0.0 && pos <= last as f64) {
            return self.law.cdf(x);
        }
        let i = (floor(pos) as usize).min(last - 1);
        let t = pos - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * self.cdf[i]
            + h10 * self.step * self.pdf[i]
            + h01 * self.cdf[i + 1]
            + h11 * self.step * self.pdf[i + 1];
        v.clamp(0.0, 1.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.law.pdf(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_error_small() {
        let base = NigParams::new(35.7, -9.8, 0.0816, 0.0251).unwrap();
        for tau in [1.0, 4.2, 26.0] {
            let law = base.scaled(tau).unwrap();
            let table = CdfTable::new(law);
            let mut worst: f64 = 0.0;
            for i in 0..997 {
                let x = -1.49 + 2.98 * i as f64 / 996.0;
                worst = worst.max((table.cdf(x) - law.cdf(x)).abs());
            }
            assert!(worst < 1e-7, "tau={tau}: {worst}");
        }
    }

    #[test]
    fn nodes_and_fallback() {
        let law = NigParams::new(35.7, -10.8, 0.0816, 0.1).unwrap();
        let table = CdfTable::new(law);
        assert!((table.cdf(0.0) - law.cdf(0.0)).abs() < 1e-9);
        assert_eq!(table.cdf(2.0), law.cdf(2.0));
        assert_eq!(table.cdf(-2.0), law.cdf(-2.0));
        assert!((table.cdf(GRID_HI) - law.cdf(GRID_HI)).abs() < 1e-12);
    }
}
