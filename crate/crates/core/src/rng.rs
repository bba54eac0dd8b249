//! Independent, reproducible random streams derived from one run seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Sample draws and tie-breaks inside the learning loop.
    Sampling = 0,
    Directions = 1,
    Centers = 2,
    /// Probes for recurrence verification.
    Verify = 3,
    /// Monte Carlo volume estimates.
    Volume = 4,
    /// Covering checks of direction nets in dimension > 2.
    NetCheck = 5,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
