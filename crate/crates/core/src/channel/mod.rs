//! Channel impairments: multipath fading, sample-rate offset, carrier
//! frequency/phase offset and AWGN, applied in that order.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::seed::{self, stage};
use crate::wavegen::{mean_power, IqFrame};
use crate::{Cf64, Error, Result};

mod resample;

pub use resample::apply_sro;

/// Largest supported sample-rate offset magnitude.
pub const MAX_SRO_PPM: f64 = 500.0;

/// Tapped-delay-line Rician channel description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSpec {
    /// Ratio of line-of-sight to diffuse power on the first tap.
    /// `f64::INFINITY` gives a pure line-of-sight tap.
    pub k_factor: f64,
    pub delay_taps: Vec<usize>,
    pub tap_powers: Vec<f64>,
}

impl Default for FadingSpec {
    fn default() -> Self {
        Self {
            k_factor: 4.0,
            delay_taps: vec![0, 2, 5],
            tap_powers: vec![0.8, 0.15, 0.05],
        }
    }
}

impl FadingSpec {
    pub fn validate(&self, frame_len: usize) -> Result<()> {
        if self.delay_taps.is_empty() || self.delay_taps.len() != self.tap_powers.len() {
            return Err(Error::param(
                "fading needs equally many (nonzero count) delays and powers",
            ));
        }
        if self.k_factor.is_nan() || self.k_factor < 0.0 {
            return Err(Error::param("k_factor must be >= 0"));
        }
        if let Some(d) = self.delay_taps.iter().find(|&&d| d >= frame_len) {
            return Err(Error::param(format!(
                "tap delay {d} exceeds frame length {frame_len}"
            )));
        }
        if self
            .tap_powers
            .iter()
            .any(|&p| !(p >= 0.0 && p.is_finite()))
        {
            return Err(Error::param("tap powers must be finite and >= 0"));
        }
        let total: f64 = self.tap_powers.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::param(format!("tap powers sum to {total}, not 1")));
        }
        Ok(())
    }

    /// Draws one complex tap gain per delay.
    pub fn realize(&self, seed: u64) -> Vec<Cf64> {
        let mut rng = seed::rng(seed);
        let (los, diffuse) = if self.k_factor.is_infinite() {
            (1.0, 0.0)
        } else {
            let k = self.k_factor;
            (k / (k + 1.0), 1.0 / (k + 1.0))
        };
        self.tap_powers
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let scatter = complex_gaussian(&mut rng, 1.0);
                let (los_p, diff_p) = if i == 0 { (los, diffuse) } else { (0.0, 1.0) };
                let theta = rng.random_range(0.0..2.0 * PI);
                let los_part = Cf64::from_polar((p * los_p).sqrt(), theta);
                los_part + scatter * (p * diff_p).sqrt()
            })
            .collect()
    }
}

/// Full impairment description for one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// `None` leaves the frame noise-free.
    pub snr_db: Option<f64>,
    pub cfo_hz: f64,
    pub phase_offset_rad: f64,
    pub sro_ppm: f64,
    pub fading: Option<FadingSpec>,
    pub channel_seed: u64,
}

impl ChannelConfig {
    /// No impairment at all.
    pub fn identity(channel_seed: u64) -> Self {
        Self {
            snr_db: None,
            cfo_hz: 0.0,
            phase_offset_rad: 0.0,
            sro_ppm: 0.0,
            fading: None,
            channel_seed,
        }
    }

    pub fn validate(&self, frame_len: usize, sample_rate_hz: f64) -> Result<()> {
        if !(self.cfo_hz.abs() < sample_rate_hz / 2.0) {
            return Err(Error::param(format!(
                "cfo {} Hz outside (-fs/2, fs/2)",
                self.cfo_hz
            )));
        }
        if !(self.sro_ppm.abs() <= MAX_SRO_PPM) {
            return Err(Error::param(format!(
                "sro {} ppm exceeds ±500",
                self.sro_ppm
            )));
        }
        if let Some(snr) = self.snr_db {
            if snr.is_nan() {
                return Err(Error::param("snr_db is NaN"));
            }
        }
        if let Some(f) = &self.fading {
            f.validate(frame_len)?;
        }
        Ok(())
    }
}

/// Ranges from which per-frame [`ChannelConfig`]s are drawn during dataset
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelRanges {
    pub max_cfo_hz: f64,
    pub max_sro_ppm: f64,
    pub random_phase: bool,
    pub fading: Option<FadingSpec>,
}

impl Default for ChannelRanges {
    fn default() -> Self {
        Self {
            max_cfo_hz: 500.0,
            max_sro_ppm: 50.0,
            random_phase: true,
            fading: Some(FadingSpec::default()),
        }
    }
}

impl ChannelRanges {
    pub fn sample(&self, snr_db: Option<f64>, channel_seed: u64) -> ChannelConfig {
        let mut rng = seed::rng(seed::derive(channel_seed, &[stage::CHANNEL]));
        let cfo_hz = symmetric(&mut rng, self.max_cfo_hz);
        let sro_ppm = symmetric(&mut rng, self.max_sro_ppm);
        let phase_offset_rad = if self.random_phase {
            rng.random_range(0.0..2.0 * PI)
        } else {
            0.0
        };
        ChannelConfig {
            snr_db,
            cfo_hz,
            phase_offset_rad,
            sro_ppm,
            fading: self.fading.clone(),
            channel_seed,
        }
    }
}

fn symmetric<R: Rng>(rng: &mut R, half_width: f64) -> f64 {
    if half_width > 0.0 {
        rng.random_range(-half_width..=half_width)
    } else {
        0.0
    }
}

fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Cf64 {
    let normal = Normal::new(0.0, (variance / 2.0).sqrt()).expect("finite variance");
    Cf64::new(normal.sample(rng), normal.sample(rng))
}

/// Adds circular complex white Gaussian noise at `snr_db` relative to the
/// frame's measured mean power. An infinite SNR returns the frame unchanged.
pub fn apply_awgn(frame: &IqFrame, snr_db: f64, seed: u64) -> Result<IqFrame> {
    if frame.is_empty() {
        return Err(Error::EmptyInput("apply_awgn on an empty frame"));
    }
    if snr_db.is_nan() {
        return Err(Error::param("snr_db is NaN"));
    }
    let mut out = frame.clone();
    out.snr_db = Some(snr_db);
    if snr_db == f64::INFINITY {
        return Ok(out);
    }
    let variance = noise_variance(mean_power(&frame.samples), snr_db);
    let sigma = (variance / 2.0).sqrt();
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::param(e.to_string()))?;
    let mut rng = seed::rng(seed);
    for s in out.samples.iter_mut() {
        *s += Cf64::new(normal.sample(&mut rng), normal.sample(&mut rng));
    }
    Ok(out)
}

/// Total complex noise variance that yields `snr_db` against `signal_power`.
pub fn noise_variance(signal_power: f64, snr_db: f64) -> f64 {
    signal_power / 10f64.powf(snr_db / 10.0)
}

/// Rotates sample `n` by `2π·cfo·n/fs + phase`.
pub fn apply_cfo_phase(frame: &IqFrame, cfo_hz: f64, phase_rad: f64) -> Result<IqFrame> {
    let fs = frame.sample_rate_hz;
    if !(cfo_hz.abs() < fs / 2.0) {
        return Err(Error::param(format!(
            "cfo {cfo_hz} Hz outside (-fs/2, fs/2)"
        )));
    }
    if cfo_hz == 0.0 && phase_rad == 0.0 {
        return Ok(frame.clone());
    }
    let step = 2.0 * PI * cfo_hz / fs;
    let samples = frame
        .samples
        .iter()
        .enumerate()
        .map(|(n, &s)| s * Cf64::from_polar(1.0, step * n as f64 + phase_rad))
        .collect();
    Ok(frame.with_samples(samples))
}

/// Convolves the frame with a seeded Rician tap realization, truncates to
/// the frame length and restores the input power.
pub fn apply_fading(frame: &IqFrame, fading: &FadingSpec, seed: u64) -> Result<IqFrame> {
    fading.validate(frame.len())?;
    let taps = fading.realize(seed);
    let n = frame.len();
    let mut out = vec![Cf64::new(0.0, 0.0); n];
    for (&d, &g) in fading.delay_taps.iter().zip(&taps) {
        for (o, &x) in out[d..].iter_mut().zip(&frame.samples) {
            *o += g * x;
        }
    }
    let p_in = frame.mean_power();
    let p_out = mean_power(&out);
    if p_out > 0.0 {
        let g = (p_in / p_out).sqrt();
        out.iter_mut().for_each(|s| *s *= g);
    }
    Ok(frame.with_samples(out))
}

/// fading → SRO → CFO/phase → AWGN. Noise comes last so the labelled SNR
/// is the SNR delivered at the receiver.
pub fn apply_channel(frame: &IqFrame, cfg: &ChannelConfig) -> Result<IqFrame> {
    cfg.validate(frame.len(), frame.sample_rate_hz)?;
    let mut out = match &cfg.fading {
        Some(f) => apply_fading(frame, f, seed::derive(cfg.channel_seed, &[stage::FADING]))?,
        None => frame.clone(),
    };
    out = apply_sro(&out, cfg.sro_ppm)?;
    out = apply_cfo_phase(&out, cfg.cfo_hz, cfg.phase_offset_rad)?;
    if let Some(snr) = cfg.snr_db {
        out = apply_awgn(&out, snr, cfg.channel_seed)?;
    }
    Ok(out)
}
