//! Reproducible random substreams.
//!
//! Every random quantity is drawn from a [`StreamToken`]: a master seed plus a
//! stream index. ChaCha supports 2^64 independent streams per seed, so a
//! replication index can be used directly as the stream and results do not
//! depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Seed used by every command when none is given.
pub const DEFAULT_SEED: u64 = 20_200_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamToken {
    pub seed: u64,
    pub stream: u64,
}

impl StreamToken {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}
