//! Seeded, splittable randomness.
//!
//! Every random decision is drawn from a ChaCha8 stream identified by a
//! `(seed, index)` pair, so results never depend on how work is scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Independent substream `index` of the generator keyed by `seed`.
pub fn substream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A fresh seed for nested work, taken from substream `index` of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    substream(seed, index).next_u64()
}
