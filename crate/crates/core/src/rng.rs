//! Seeded random streams.
//!
//! A [`RandomStream`] is a ChaCha8 generator. Independent streams for
//! parallel work are derived from a master seed plus a 64-bit stream id, so
//! the numbers a work unit sees never depend on scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        RandomStream { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Stream `id` of the generator keyed by `master_seed`.
    pub fn derive(master_seed: u64, id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(id);
        RandomStream { rng }
    }

    /// Stream for replication `replication` of sample size `n`: the stream id
    /// packs `n` into the high 32 bits and the replication into the low 32.
    pub fn for_replication(master_seed: u64, n: usize, replication: usize) -> Self {
        let id = ((n as u64) << 32) | (replication as u64 & 0xffff_ffff);
        Self::derive(master_seed, id)
    }

    /// Uniform on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
