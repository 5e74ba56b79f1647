//! Deterministic seed derivation.
//!
//! Every random stream in the crate is keyed by a path of indices
//! (seed, layer, forest, fold, tree, node, ...), so results never depend
//! on the order in which parallel work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `base` with each element of `path` in turn.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(base), |acc, &p| {
        splitmix64(acc ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)))
    })
}

pub fn rng_for(base: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, path))
}
