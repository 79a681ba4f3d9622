//! Deterministic seed derivation.
//!
//! Every stream in the crate is derived from a base seed and an index through
//! [`mix_seed`], a splitmix64-style finalizer. Training iterations, runs and
//! per-episode substreams all use it.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of the `index`-th child stream of `base`.
#[inline]
pub fn mix_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ index.wrapping_mul(GOLDEN))
}
