//! Seeded per-trajectory random streams.
//!
//! Trajectory `i` of a run with master seed `s` always reads from ChaCha8
//! keyed by `s` on stream `i`, so any trajectory can be regenerated in
//! isolation and the result does not depend on scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Deterministic uniform source for one trajectory.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Unit-rate exponential draw.
    pub fn standard_exponential(&mut self) -> f64 {
        -libm::log(self.uniform())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
