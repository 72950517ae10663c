//! Seed derivation and the generator used for every random draw.
//!
//! Graphs are drawn from ChaCha8 (a counter-based stream cipher generator),
//! seeded with a 64-bit token. Ensemble members get their tokens by hashing
//! `(master_seed, stream tag, indices...)` through SplitMix64 finalizers, so
//! a given instantiation always sees the same stream no matter which worker
//! runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type behind every graph sample.
pub type GraphRng = ChaCha8Rng;

/// Stream tag for planted-partition grid points.
pub const STREAM_PLANTED: u64 = 0x7070_6d5f_6772_6964; // "ppm_grid"
/// Stream tag for the paired baseline ensemble.
pub const STREAM_BASELINE: u64 = 0x6572_5f62_6173_6500; // "er_base"
/// Stream tag for Lanczos start vectors.
pub const STREAM_LANCZOS: u64 = 0x6c61_6e63_7a6f_7300; // "lanczos"

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of stream words into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &word| splitmix64(acc ^ splitmix64(word)))
}

pub fn rng_from_seed(seed: u64) -> GraphRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let a = derive_seed(42, &[STREAM_PLANTED, 3, 7]);
        assert_eq!(a, derive_seed(42, &[STREAM_PLANTED, 3, 7]));
        let mut seen = HashSet::new();
        for g in 0..50u64 {
            for r in 0..50u64 {
                assert!(seen.insert(derive_seed(42, &[STREAM_PLANTED, g, r])));
            }
        }
        // index order matters
        assert_ne!(
            derive_seed(1, &[STREAM_PLANTED, 0, 1]),
            derive_seed(1, &[STREAM_PLANTED, 1, 0])
        );
        assert_ne!(
            derive_seed(1, &[STREAM_PLANTED, 0]),
            derive_seed(1, &[STREAM_BASELINE, 0])
        );
    }
}
