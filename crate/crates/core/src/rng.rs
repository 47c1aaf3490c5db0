//! Seeded random source shared by the generators and the genetic search.
//!
//! xoshiro256++ seeded through SplitMix64: both algorithms are fully
//! specified, so a seed reproduces the same stream in any implementation.

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus as Rng64;

pub fn seeded(seed: u64) -> Rng64 {
    Rng64::seed_from_u64(seed)
}
