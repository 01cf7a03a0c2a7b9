//! Seeded random streams.
//!
//! Every stochastic routine takes a `u64` base seed and derives one
//! ChaCha8 stream per replicate (`set_stream(index)`), so results do not
//! depend on how replicates are scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for replicate `stream` under `base_seed`.
pub fn stream_rng(base_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
