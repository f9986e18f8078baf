//! Uniform randomness for the online sampler.
//!
//! The stream is pinned: a ChaCha8 generator keyed from a 64-bit seed
//! (via the standard splitmix expansion in `seed_from_u64`) so that
//! equal seeds reproduce equal sample streams on every platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Source of uniform variates on `[0, 1)`.
pub trait RandomSource {
    fn next_unit(&mut self) -> f64;
}

/// The default deterministic source.
#[derive(Debug, Clone)]
pub struct ChaChaSource {
    rng: ChaCha8Rng,
}

impl ChaChaSource {
    pub fn seeded(seed: u64) -> Self {
        ChaChaSource { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Worker stream `index` derived from a base seed.
    pub fn shard(seed: u64, index: u64) -> Self {
        ChaChaSource::seeded(seed ^ index)
    }
}

impl RandomSource for ChaChaSource {
    fn next_unit(&mut self) -> f64 {
        // top 53 bits give a uniform double in [0, 1)
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

/// Replays a fixed list of variates; panics when exhausted. Intended
/// for hand-worked examples in tests.
#[derive(Debug, Clone)]
pub struct ScriptedSource {
    values: Vec<f64>,
    next: usize,
}

impl ScriptedSource {
    pub fn new(values: Vec<f64>) -> Self {
        ScriptedSource { values, next: 0 }
    }
}

impl RandomSource for ScriptedSource {
    fn next_unit(&mut self) -> f64 {
        let v = self.values[self.next];
        self.next += 1;
        v
    }
}
