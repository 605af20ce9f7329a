//! Seeded random streams. Every checker derives its own stream from
//! `(seed, stream id)` so checkers never share mutable RNG state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type CheckRng = ChaCha8Rng;

pub fn stream(seed: u64, stream_id: u64) -> CheckRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}
