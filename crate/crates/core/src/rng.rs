//! Seeded random streams.
//!
//! Every experiment draws from ChaCha8 (`rand_chacha::ChaCha8Rng`): a 256-bit
//! key derived from the 64-bit seed by `seed_from_u64` (PCG32 expansion), a
//! 64-bit stream id and a 64-bit block counter. The keystream is fully
//! specified by the ChaCha algorithm, so a given `(seed, stream)` yields the
//! same values on every platform. Trial or replication `i` uses stream `i`,
//! which keeps results independent of how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
