//! Seeding. Every random quantity in the crate is drawn from
//! `Xoshiro256PlusPlus`, seeded through SplitMix64, so a seed plus the
//! parameters pins down every generated tree and configuration bit for bit.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

/// The generator used throughout the crate.
pub type SimRng = Xoshiro256PlusPlus;

/// Explicit 64-bit seed.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> SimRng {
        SimRng::seed_from_u64(self.0)
    }

    /// Independent stream for the pair `(a, b)`, e.g. (grid index, trial index).
    pub fn substream(self, a: u64, b: u64) -> SimRng {
        SimRng::seed_from_u64(self.derive(a, b).0)
    }

    /// Seed of the substream for `(a, b)`, for APIs that take a seed.
    pub fn derive(self, a: u64, b: u64) -> RngSeed {
        let key = splitmix64(splitmix64(self.0 ^ 0x6a09_e667_f3bc_c909) ^ a);
        RngSeed(splitmix64(key ^ b.rotate_left(17)))
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        Self(v)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
