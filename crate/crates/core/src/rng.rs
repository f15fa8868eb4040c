//! Deterministic per-chunk random streams.
//!
//! Work is cut into fixed-size chunks; chunk `i` always draws from stream `i`
//! of the seeded ChaCha generator, so results do not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CHUNK_SIZE: usize = 1 << 14;

pub fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// `(chunk index, number of items in chunk)` for `n` items.
pub fn chunks(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK_SIZE))
        .map(|c| (c, CHUNK_SIZE.min(n - c * CHUNK_SIZE)))
        .collect()
}
