//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 seeded with a 64-bit seed. Independent
//! consumers (restarts, matrix rows) get their own stream number on the same
//! key, so results do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream ids used by the generators; rows get `ROW_BASE + row`.
pub(crate) const ROW_BASE: u64 = 1 << 32;
pub(crate) const LAYOUT_STREAM: u64 = 0;
