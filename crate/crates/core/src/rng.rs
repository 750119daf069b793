//! Seeded random streams.
//!
//! All randomness goes through ChaCha8 (`rand_chacha::ChaCha8Rng`), which is
//! specified bit-for-bit and therefore reproducible across platforms. One
//! experiment seed feeds several independent streams, one per purpose, so
//! that e.g. changing the number of collocation points does not perturb the
//! basis weights.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose of a random stream derived from an experiment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    BasisWeights = 1,
    Collocation = 2,
    SensorNoise = 3,
}

/// Generator for `stream` of experiment `seed`.
pub fn stream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
