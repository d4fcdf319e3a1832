//! Seeded random streams.
//!
//! Every estimator takes a caller-supplied master stream. Batches of walks
//! draw one key from it and give walk `i` its own ChaCha stream `i` under that
//! key, so a batch's outcome does not depend on how walks are scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Master stream for a seed.
pub fn master(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under `key`.
pub fn substream(key: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Draws a fresh substream key from `rng`.
pub fn fork_key<R: RngCore + ?Sized>(rng: &mut R) -> u64 {
    rng.next_u64()
}
