//! Seeded randomness for every sampling routine in the crate.
//!
//! All randomness flows through [`SimRng`]. Parallel tasks never share a
//! generator: each one forks its own stream from the master seed by a task
//! counter, so results are independent of thread scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// A reproducible random stream: ChaCha20 keyed by a 64-bit seed.
#[derive(Clone, Debug)]
pub struct SimRng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream number `index` under the same master seed.
    ///
    /// Stream 0 is the master stream itself, so forks start at 1.
    pub fn fork(&self, index: u64) -> SimRng {
        let mut inner = ChaCha20Rng::seed_from_u64(self.seed);
        inner.set_stream(index.wrapping_add(1));
        SimRng {
            seed: self.seed,
            inner,
        }
    }

    /// Draws a fresh master seed from this stream, for handing to a sub-experiment.
    pub fn next_seed(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
