//! Simulation environments implementing [`Environment`](crate::optimizer::Environment).
//!
//! - [`gpd`]: single-period cost drawn from a GPD whose scale depends on θ.
//! - [`hedging`]: Delta-Gamma hedging of a short call under NIG returns.

pub mod gpd;
pub mod hedging;
