//! Seed handling. Every randomized routine takes an explicit `u64` seed and
//! builds its own ChaCha stream from it, so results are reproducible across
//! platforms and independent of call order elsewhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default master seed, the ASCII bytes of "SIMON".
pub const DEFAULT_SEED: u64 = 0x53_49_4D_4F_4E;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `i`-th independent stream under `master`: `master ^ mix64(i)`.
pub fn derive_seed(master: u64, i: u64) -> u64 {
    master ^ mix64(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = rng(derive_seed(7, 1)).gen();
        let b: u64 = rng(derive_seed(7, 1)).gen();
        let c: u64 = rng(derive_seed(7, 2)).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
