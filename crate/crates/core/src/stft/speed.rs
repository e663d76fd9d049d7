//! Wall-clock comparison of the high-resolution and transformed presets.
//!
//! Source frames are 8192 samples long (the high-resolution acquisition
//! span). The high-resolution preset analyses the whole frame; the
//! transformed preset analyses its leading 1024 samples, which is the span
//! it needs.

use std::hint::black_box;
use std::time::Instant;

use super::{SpectrogramConfig, StftEngine};
use crate::wavegen::{synthesize_clean_frame, FrameSpec, IqFrame, ModulationScheme};
use crate::Result;

pub const HIGHRES_SPAN: usize = 8192;
pub const TRANSFORMED_SPAN: usize = 1024;

#[derive(Debug, Clone)]
pub struct SpeedReport {
    pub n_spectrograms: usize,
    /// Seconds per batch of `n_spectrograms`, one entry per timed run.
    pub highres_runs: Vec<f64>,
    pub transformed_runs: Vec<f64>,
}

impl SpeedReport {
    pub fn median_highres(&self) -> f64 {
        median(&self.highres_runs)
    }

    pub fn median_transformed(&self) -> f64 {
        median(&self.transformed_runs)
    }

    pub fn speedup(&self) -> f64 {
        self.median_highres() / self.median_transformed()
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Distinct source frames cycled through during timing.
const SOURCE_FRAMES: usize = 16;

pub fn source_frames(master_seed: u64) -> Result<Vec<IqFrame>> {
    let spec = FrameSpec {
        frame_length_samples: HIGHRES_SPAN,
        master_seed,
        ..FrameSpec::default()
    };
    (0..SOURCE_FRAMES)
        .map(|i| {
            let scheme = ModulationScheme::ALL[i % ModulationScheme::ALL.len()];
            synthesize_clean_frame(scheme, &spec, i as u64)
        })
        .collect()
}

fn time_batch(engine: &StftEngine, frames: &[IqFrame], span: usize, n: usize) -> Result<f64> {
    let start = Instant::now();
    for i in 0..n {
        let f = &frames[i % frames.len()];
        let s = engine.compute_samples(black_box(&f.samples[..span]), f.sample_rate_hz)?;
        black_box(&s);
    }
    Ok(start.elapsed().as_secs_f64())
}

/// Times `n_spectrograms` conversions under each preset, `runs` times each
/// after one warm-up batch, alternating presets between runs.
pub fn measure(n_spectrograms: usize, runs: usize, master_seed: u64) -> Result<SpeedReport> {
    let frames = source_frames(master_seed)?;
    let hi = StftEngine::new(SpectrogramConfig::highres())?;
    let lo = StftEngine::new(SpectrogramConfig::transformed())?;
    time_batch(&hi, &frames, HIGHRES_SPAN, n_spectrograms.min(50))?;
    time_batch(&lo, &frames, TRANSFORMED_SPAN, n_spectrograms.min(50))?;
    let mut report = SpeedReport {
        n_spectrograms,
        highres_runs: Vec::with_capacity(runs),
        transformed_runs: Vec::with_capacity(runs),
    };
    for _ in 0..runs {
        report
            .highres_runs
            .push(time_batch(&hi, &frames, HIGHRES_SPAN, n_spectrograms)?);
        report
            .transformed_runs
            .push(time_batch(&lo, &frames, TRANSFORMED_SPAN, n_spectrograms)?);
    }
    Ok(report)
}
