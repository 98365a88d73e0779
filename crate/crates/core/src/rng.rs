//! Counter-based random streams.
//!
//! Every replicate of a simulation draws from its own ChaCha stream selected
//! by `(seed, replicate)`. The stream for a replicate never depends on how
//! replicates are split across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::for_replicate(seed, 0)
    }

    /// Independent substream keyed by the replicate index.
    pub fn for_replicate(seed: u64, replicate: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(replicate);
        Self { inner }
    }

    /// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}
