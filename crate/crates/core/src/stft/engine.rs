use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{spectrogram_length, time_resolution, window, SpectrogramConfig};
use crate::wavegen::{IqFrame, ModulationScheme};
use crate::{Cf64, Error, Result};

/// Time × frequency magnitude grid in dB, stored row-major
/// `[n_frames × n_bins]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub magnitudes_db: Vec<f64>,
    pub n_frames: usize,
    pub n_bins: usize,
    /// Seconds per time bin (`W / fs`).
    pub delta_t: f64,
    pub sample_rate_hz: f64,
    pub config: SpectrogramConfig,
    pub scheme: Option<ModulationScheme>,
    pub snr_db: Option<f64>,
    pub frame_seed: Option<u64>,
}

impl Spectrogram {
    pub fn row(&self, frame: usize) -> &[f64] {
        &self.magnitudes_db[frame * self.n_bins..(frame + 1) * self.n_bins]
    }

    pub fn get(&self, frame: usize, bin: usize) -> f64 {
        self.magnitudes_db[frame * self.n_bins + bin]
    }

    /// Center frequency of output bin `bin` in Hz.
    pub fn bin_frequency(&self, bin: usize) -> f64 {
        let df = self.sample_rate_hz / self.config.nfft as f64;
        if self.config.two_sided {
            (bin as f64 - (self.config.nfft / 2) as f64) * df
        } else {
            bin as f64 * df
        }
    }
}

/// Reusable STFT with a planned FFT and precomputed window.
pub struct StftEngine {
    config: SpectrogramConfig,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl StftEngine {
    pub fn new(config: SpectrogramConfig) -> Result<Self> {
        config.validate()?;
        let window = window(config.window, config.window_len);
        let fft = FftPlanner::new().plan_fft_forward(config.nfft);
        Ok(Self {
            config,
            window,
            fft,
        })
    }

    pub fn config(&self) -> &SpectrogramConfig {
        &self.config
    }

    /// Complex spectra in natural FFT bin order, one per STFT frame. A final
    /// frame that runs past the end of the signal is zero-filled.
    pub fn spectra(&self, samples: &[Cf64]) -> Result<Vec<Vec<Cf64>>> {
        let cfg = &self.config;
        let n_frames = spectrogram_length(samples.len(), cfg.window_len, cfg.overlap)?;
        let mut scratch = vec![Cf64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        Ok((0..n_frames)
            .map(|t| {
                let mut buf = vec![Cf64::new(0.0, 0.0); cfg.nfft];
                self.load_segment(samples, t, &mut buf);
                self.fft.process_with_scratch(&mut buf, &mut scratch);
                buf
            })
            .collect())
    }

    fn load_segment(&self, samples: &[Cf64], t: usize, buf: &mut [Cf64]) {
        let start = t * self.config.hop();
        let end = (start + self.config.window_len).min(samples.len());
        for ((b, &x), &w) in buf.iter_mut().zip(&samples[start..end]).zip(&self.window) {
            *b = x * w;
        }
        for b in buf[end - start..].iter_mut() {
            *b = Cf64::new(0.0, 0.0);
        }
    }

    /// Magnitude spectrogram of raw samples.
    pub fn compute_samples(&self, samples: &[Cf64], sample_rate_hz: f64) -> Result<Spectrogram> {
        let cfg = &self.config;
        let n_frames = spectrogram_length(samples.len(), cfg.window_len, cfg.overlap)?;
        let n_bins = cfg.n_bins();
        let nfft = cfg.nfft;
        let mut out = Vec::with_capacity(n_frames * n_bins);
        let mut buf = vec![Cf64::new(0.0, 0.0); nfft];
        let mut scratch = vec![Cf64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let to_db = |v: Cf64| (10.0 * v.norm_sqr().log10()).max(cfg.db_floor);
        for t in 0..n_frames {
            self.load_segment(samples, t, &mut buf);
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            if cfg.two_sided {
                let half = nfft / 2;
                out.extend(buf[half..].iter().chain(&buf[..half]).map(|&v| to_db(v)));
            } else {
                out.extend(buf[..n_bins].iter().map(|&v| to_db(v)));
            }
        }
        Ok(Spectrogram {
            magnitudes_db: out,
            n_frames,
            n_bins,
            delta_t: time_resolution(cfg.window_len, sample_rate_hz),
            sample_rate_hz,
            config: cfg.clone(),
            scheme: None,
            snr_db: None,
            frame_seed: None,
        })
    }

    pub fn compute(&self, frame: &IqFrame) -> Result<Spectrogram> {
        if frame.len() < self.config.window_len {
            return Err(Error::TooShort {
                len: frame.len(),
                window: self.config.window_len,
            });
        }
        let mut s = self.compute_samples(&frame.samples, frame.sample_rate_hz)?;
        s.scheme = Some(frame.scheme);
        s.snr_db = frame.snr_db;
        s.frame_seed = Some(frame.frame_seed);
        Ok(s)
    }
}

/// One-shot spectrogram of `frame` under `cfg`.
pub fn compute_spectrogram(frame: &IqFrame, cfg: &SpectrogramConfig) -> Result<Spectrogram> {
    StftEngine::new(cfg.clone())?.compute(frame)
}
