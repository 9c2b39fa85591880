//! Stable seed derivation.
//!
//! Every random draw in the benchmark is seeded from the master seed plus the
//! identity of the cell that performs it, so results do not depend on the
//! order in which parallel cells finish.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Builder for a seed derived from a parent seed and a sequence of labels.
#[derive(Clone, Copy, Debug)]
pub struct SeedPath(u64);

impl SeedPath {
    pub fn new(master: u64) -> Self {
        SeedPath(splitmix64(master))
    }

    pub fn num(self, n: u64) -> Self {
        SeedPath(splitmix64(self.0 ^ splitmix64(n)))
    }

    pub fn label(self, s: &str) -> Self {
        SeedPath(splitmix64(self.0 ^ fnv1a(s.as_bytes())))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Deterministic RNG for a plain seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
