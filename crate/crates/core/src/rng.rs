//! Seed derivation. Every random decision in the crate goes through a
//! [`ChaCha8Rng`] seeded from a master seed and a stream tag, so results do
//! not depend on scheduling or on the order streams are consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a stream tag into an independent child seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream tags used across the crate.
pub mod stream {
    pub const COARSEN: u64 = 1;
    pub const LHS: u64 = 2;
    pub const TRIAL: u64 = 3;
    pub const SPLIT: u64 = 4;
    pub const SYNOPSIS_SPLIT: u64 = 5;
    pub const RANDOM_SEARCH: u64 = 6;
    pub const GP: u64 = 7;
    pub const EVAL: u64 = 8;
    pub const LIFT: u64 = 9;
}
