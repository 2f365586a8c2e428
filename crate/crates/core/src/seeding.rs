use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stride used to derive independent sub-seeds from a master seed.
pub(crate) const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn derive(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(SEED_STRIDE.wrapping_mul(index.wrapping_add(1)))
}
