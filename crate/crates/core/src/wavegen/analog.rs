//! Synthetic program material for the analog schemes.

use std::f64::consts::PI;

use rand::Rng;
use rustfft::FftPlanner;

use crate::{seed, Cf64};

/// Upper edge of the synthetic program band.
pub const ANALOG_BANDWIDTH_HZ: f64 = 15_000.0;

const N_TONES: usize = 8;
const TONE_LO_HZ: f64 = 200.0;
const TONE_HI_HZ: f64 = 12_000.0;

/// A zero-mean multitone "program" signal: eight random-phase sinusoids
/// between 200 Hz and 12 kHz with 1/f amplitudes, peak-normalized to 1.
pub fn synth_analog_source(duration_samples: usize, sample_rate_hz: f64, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    let tones: Vec<(f64, f64, f64)> = (0..N_TONES)
        .map(|_| {
            let f = rng.random_range(TONE_LO_HZ..TONE_HI_HZ);
            let phase = rng.random_range(0.0..2.0 * PI);
            (f, TONE_LO_HZ / f, phase)
        })
        .collect();
    let mut x: Vec<f64> = (0..duration_samples)
        .map(|n| {
            let t = n as f64 / sample_rate_hz;
            tones
                .iter()
                .map(|&(f, a, ph)| a * (2.0 * PI * f * t + ph).cos())
                .sum()
        })
        .collect();
    if x.is_empty() {
        return x;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        x.iter_mut().for_each(|v| *v /= peak);
    }
    x
}

/// Analytic signal `x + j·H{x}` via the one-sided spectrum.
pub fn analytic_signal(x: &[f64]) -> Vec<Cf64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Cf64> = x.iter().map(|&v| Cf64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    for (k, v) in buf.iter_mut().enumerate() {
        let gain = if k == 0 || (n % 2 == 0 && k == half) {
            1.0
        } else if k < n.div_ceil(2) {
            2.0
        } else {
            0.0
        };
        *v *= gain;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter_mut().for_each(|v| *v /= n as f64);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stft::naive_dft;

    #[test]
    fn peak_and_mean() {
        for s in 0..20u64 {
            let x = synth_analog_source(1024, 200_000.0, s);
            let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(peak <= 1.0 + 1e-15);
            let mean = x.iter().sum::<f64>() / x.len() as f64;
            assert!(mean.abs() < 1e-2 * peak);
        }
    }

    #[test]
    fn band_limited_by_dft_oracle() {
        let fs = 200_000.0;
        for s in 0..10u64 {
            let x = synth_analog_source(1024, fs, s);
            let seg: Vec<Cf64> = x.iter().map(|&v| Cf64::new(v, 0.0)).collect();
            let spec = naive_dft(&seg, 1024);
            let (mut total, mut above) = (0.0, 0.0);
            for (k, v) in spec.iter().enumerate() {
                let kk = if k <= 512 {
                    k as f64
                } else {
                    k as f64 - 1024.0
                };
                let f = kk * fs / 1024.0;
                let e = v.norm_sqr();
                total += e;
                if f.abs() > ANALOG_BANDWIDTH_HZ {
                    above += e;
                }
            }
            assert!(above / total < 0.01, "seed {s}: {}", above / total);
        }
    }

    #[test]
    fn analytic_signal_of_cosine_is_phasor() {
        let n = 256;
        let x: Vec<f64> = (0..n)
            .map(|k| (2.0 * PI * 8.0 * k as f64 / n as f64).cos())
            .collect();
        let z = analytic_signal(&x);
        for (k, v) in z.iter().enumerate() {
            let want = Cf64::from_polar(1.0, 2.0 * PI * 8.0 * k as f64 / n as f64);
            assert!((v - want).norm() < 1e-12);
        }
    }
}
