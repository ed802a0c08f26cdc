//! Seed derivation. Every random choice is drawn from a ChaCha8 stream whose
//! seed is derived from one root seed by `derive_seed(root, stream, index)`:
//!
//! `splitmix64(splitmix64(root ^ stream * 0x9E3779B97F4A7C15) ^ (index + 1) * 0xBF58476D1CE4E5B9)`
//!
//! so that any trial can be replayed from `(root, stream, index)` alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream labels used by the pipelines.
pub mod stream {
    pub const SHIFT: u64 = 1;
    pub const TRIAL: u64 = 2;
    pub const FIBER: u64 = 3;
    pub const FOURIER: u64 = 4;
    pub const SWEEP: u64 = 5;
    pub const CIRCUMFERENCE: u64 = 6;
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix64(root ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(a ^ index.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derive_rng(root: u64, stream: u64, index: u64) -> SimRng {
    rng_from_seed(derive_seed(root, stream, index))
}
