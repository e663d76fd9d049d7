//! Fixtures shared by the criterion benches.

use specamc::dataset::{synthesize_sample, Sample};
use specamc::stft::speed;
use specamc::{Cf64, DatasetConfig, IqFrame};

pub const SEED: u64 = 0xBE7C;

/// 8192-sample frames, one per scheme (cycled).
pub fn frames() -> Vec<IqFrame> {
    speed::source_frames(SEED).expect("fixture frames")
}

/// Leading `n` samples of the first fixture frame.
pub fn segment(n: usize) -> Vec<Cf64> {
    frames()[0].samples[..n].to_vec()
}

/// A batch of 64×64 grayscale images across all classes at 20 dB.
pub fn images(n: usize) -> Vec<Sample> {
    let cfg = DatasetConfig::default();
    (0..n)
        .map(|i| {
            let label = i % cfg.schemes.len();
            synthesize_sample(&cfg, cfg.schemes[label], label, 20, i as u64).expect("fixture image")
        })
        .collect()
}
