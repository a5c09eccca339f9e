//! Seedable pseudo-random stream shared by seeding and the optimizer.

use rand::SeedableRng;

/// xoshiro256++; the same seed always produces the same stream on every platform.
pub type PlannerRng = rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng_from_seed(seed: u64) -> PlannerRng {
    PlannerRng::seed_from_u64(seed)
}
