//! Deterministic random streams.
//!
//! Every run owns a single seed. Independent ChaCha streams are derived from it
//! per purpose and per task, so that changing how one phase consumes random
//! numbers does not perturb any other phase.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    /// Initial population sampling.
    Init = 1,
    /// Parent selection, crossover and mutation within one task.
    Mating = 2,
    /// Inter-task pairing decisions and inter-task offspring.
    Transfer = 3,
    /// Monte Carlo estimates inside metrics.
    Metrics = 4,
}

/// Seeds independent streams from one run seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamSeed(pub u64);

impl StreamSeed {
    pub fn stream(self, purpose: Purpose, index: usize) -> Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(((purpose as u64) << 32) | index as u64);
        rng
    }
}
