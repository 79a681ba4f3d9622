//! Tail-risk policy gradients built on peaks-over-threshold CVaR estimates.
//!
//! The crate is `no_std` and only needs an allocator. It contains:
//!
//! - [`evt`]: generalized Pareto machinery, sample-averaging VaR/CVaR,
//!   Anderson-Darling threshold selection and the POT CVaR estimator.
//! - [`optimizer`]: forward finite-difference gradients with common random
//!   numbers, ADAM, and the training loop.
//! - [`env`]: the controlled GPD environment and the NIG Delta-Gamma hedging
//!   environment.
//!
//! File formats, the CLI and multi-run orchestration live in the `potpg`
//! companion crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod env;
mod error;
pub mod evt;
pub(crate) mod math;
pub mod numeric;
pub mod optimizer;
pub mod seed;

pub use error::{Error, Result};
