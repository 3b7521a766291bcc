//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a master seed and selected
//! by a stream number (the trial index), so realizations do not depend on
//! thread count or scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform double in [0, 1) with 53 random bits.
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A fair coin per call.
pub fn coin<R: RngCore>(rng: &mut R) -> bool {
    rng.next_u64() >> 63 == 1
}
