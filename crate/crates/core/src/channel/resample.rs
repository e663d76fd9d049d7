use std::f64::consts::PI;

use crate::wavegen::IqFrame;
use crate::{Cf64, Error, Result};

use super::MAX_SRO_PPM;

/// Interpolation kernel half-width in input samples.
const HALF_WIDTH: isize = 16;

fn kernel(d: f64) -> f64 {
    let h = HALF_WIDTH as f64;
    if d.abs() >= h {
        return 0.0;
    }
    let sinc = if d == 0.0 {
        1.0
    } else {
        (PI * d).sin() / (PI * d)
    };
    sinc * 0.5 * (1.0 + (PI * d / h).cos())
}

/// Resamples the frame so that output sample `n` is the input evaluated at
/// `n·(1 + ppm·10⁻⁶)` (Hann-windowed sinc interpolation). Positions past the
/// end of the input read zeros; the output keeps the input length.
pub fn apply_sro(frame: &IqFrame, sro_ppm: f64) -> Result<IqFrame> {
    if !(sro_ppm.abs() <= MAX_SRO_PPM) {
        return Err(Error::param(format!("sro {sro_ppm} ppm exceeds ±500")));
    }
    if sro_ppm == 0.0 {
        return Ok(frame.clone());
    }
    let ratio = 1.0 + sro_ppm * 1e-6;
    let x = &frame.samples;
    let len = x.len() as isize;
    let samples = (0..x.len())
        .map(|n| {
            let t = n as f64 * ratio;
            let base = t.floor() as isize;
            let frac = t - base as f64;
            let mut acc = Cf64::new(0.0, 0.0);
            for j in (1 - HALF_WIDTH)..=HALF_WIDTH {
                let k = base + j;
                if (0..len).contains(&k) {
                    acc += x[k as usize] * kernel(j as f64 - frac);
                }
            }
            acc
        })
        .collect();
    Ok(frame.with_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavegen::ModulationScheme;

    fn tone(f0: f64, n: usize) -> IqFrame {
        IqFrame {
            samples: (0..n)
                .map(|k| Cf64::from_polar(1.0, 2.0 * PI * f0 * k as f64 / 200_000.0))
                .collect(),
            scheme: ModulationScheme::Bpsk,
            snr_db: None,
            frame_seed: 0,
            sample_rate_hz: 200_000.0,
        }
    }

    /// Mean phase increment over interior samples, in Hz.
    fn tone_frequency(x: &[Cf64]) -> f64 {
        let inner = &x[64..x.len() - 64];
        let acc: Cf64 = inner.windows(2).map(|w| w[1] * w[0].conj()).sum();
        acc.arg() * 200_000.0 / (2.0 * PI)
    }

    #[test]
    fn zero_ppm_identity() {
        let f = tone(1000.0, 256);
        assert_eq!(apply_sro(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn keeps_length() {
        for ppm in [-500.0, -50.0, 1.0, 50.0, 500.0] {
            assert_eq!(apply_sro(&tone(3000.0, 1024), ppm).unwrap().len(), 1024);
        }
        assert!(apply_sro(&tone(3000.0, 16), 600.0).is_err());
    }

    #[test]
    fn scales_tone_frequency() {
        let f0 = 25_000.0;
        let out = apply_sro(&tone(f0, 4096), 50.0).unwrap();
        let est = tone_frequency(&out.samples);
        assert!((est - f0 * 1.00005).abs() < 0.05, "{est}");

        // coarse check with the DFT peak: within one bin of the scaled tone
        let spec = crate::stft::naive_dft(&out.samples[..1024], 1024);
        let peak = (0..1024)
            .max_by(|&a, &b| spec[a].norm().partial_cmp(&spec[b].norm()).unwrap())
            .unwrap();
        let bin_hz = 200_000.0 / 1024.0;
        assert!((peak as f64 * bin_hz - f0 * 1.00005).abs() <= bin_hz);
    }
}
