//! Deterministic seed derivation.
//!
//! Every random quantity in the pipeline is drawn from a ChaCha stream keyed
//! on a 64-bit seed derived from the master seed and the coordinates of the
//! item (scheme, frame index, stage). Derivation is a pure function, so any
//! subset of items can be regenerated in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one seed.
pub fn derive(base: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(mix64(base), |acc, &w| mix64(acc ^ mix64(w)))
}

/// Stage tags used with [`derive`] so that streams never collide.
pub mod stage {
    pub const FRAME: u64 = 0x4652_414d;
    pub const CHANNEL: u64 = 0x4348_414e;
    pub const FADING: u64 = 0x4641_4445;
    pub const FOLD: u64 = 0x464f_4c44;
    pub const INIT: u64 = 0x494e_4954;
    pub const SHUFFLE: u64 = 0x5348_5546;
    pub const DROPOUT: u64 = 0x4452_4f50;
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
