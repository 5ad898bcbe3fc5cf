//! Seeded random number generation.
//!
//! Every random draw in this crate comes from ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`. The stream is specified independently of the
//! host platform, so a given seed produces the same graphs everywhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in run metadata.
pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
