use alloc::vec;
use alloc::vec::Vec;

use crate::math::{powf, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps_hat: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { beta1: 0.9, beta2: 0.999, eps_hat: 1e-8 }
    }
}

/// Moment estimates of the ADAM optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub config: AdamConfig,
}

impl AdamState {
    pub fn new(dim: usize, config: AdamConfig) -> Self {
        Self { m: vec![0.0; dim], v: vec![0.0; dim], t: 0, config }
    }

    /// Bias-corrected ADAM update; returns the descent step
    /// `-step_size · m̂/(√v̂ + ε̂)` to add to the parameters.
    pub fn step(&mut self, grad: &[f64], step_size: f64) -> Result<Vec<f64>> {
        if grad.len() != self.m.len() {
            return Err(Error::DimensionMismatch { expected: self.m.len(), actual: grad.len() });
        }
        let AdamConfig { beta1, beta2, eps_hat } = self.config;
        self.t += 1;
        let t = self.t as f64;
        let c1 = 1.0 - powf(beta1, t);
        let c2 = 1.0 - powf(beta2, t);
        let mut delta = Vec::with_capacity(grad.len());
        for ((m, v), &g) in self.m.iter_mut().zip(self.v.iter_mut()).zip(grad) {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            delta.push(-step_size * m_hat / (sqrt(v_hat) + eps_hat));
        }
        Ok(delta)
    }
}
