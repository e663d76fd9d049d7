//! Root-raised-cosine pulse shaping.

use std::f64::consts::PI;

use super::FrameSpec;
use crate::{Cf64, Error, Result};

/// RRC taps spanning `span_symbols` symbols (`span_symbols * sps + 1` taps),
/// scaled so that unit-power symbols produce unit-power output.
pub fn rrc_taps(sps: usize, rolloff: f64, span_symbols: usize) -> Vec<f64> {
    let len = span_symbols * sps + 1;
    let center = (len - 1) as f64 / 2.0;
    let b = rolloff;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| {
            let t = (i as f64 - center) / sps as f64;
            if t.abs() < 1e-12 {
                1.0 + b * (4.0 / PI - 1.0)
            } else if (t.abs() - 1.0 / (4.0 * b)).abs() < 1e-12 {
                b / 2f64.sqrt()
                    * ((1.0 + 2.0 / PI) * (PI / (4.0 * b)).sin()
                        + (1.0 - 2.0 / PI) * (PI / (4.0 * b)).cos())
            } else {
                let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
                let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
                num / den
            }
        })
        .collect();
    // mirror so the taps are symmetric to the last bit
    for k in 0..len / 2 {
        let avg = 0.5 * (taps[k] + taps[len - 1 - k]);
        taps[k] = avg;
        taps[len - 1 - k] = avg;
    }
    let energy: f64 = taps.iter().map(|h| h * h).sum();
    let scale = (sps as f64 / energy).sqrt();
    taps.iter_mut().for_each(|h| *h *= scale);
    taps
}

/// Upsamples `symbols` by `samples_per_symbol` and filters with the RRC
/// pulse. The filter delay is compensated, so symbol `k` peaks at sample
/// `k * sps`; the output has exactly `symbols.len() * sps` samples.
pub fn pulse_shape(symbols: &[Cf64], spec: &FrameSpec) -> Result<Vec<Cf64>> {
    if symbols.is_empty() {
        return Err(Error::EmptyInput("pulse_shape needs at least one symbol"));
    }
    let sps = spec.samples_per_symbol;
    if sps < 2 {
        return Err(Error::param("samples_per_symbol must be at least 2"));
    }
    let taps = rrc_taps(sps, spec.rrc_rolloff, spec.rrc_span_symbols);
    let half = (taps.len() - 1) / 2;
    let n_out = symbols.len() * sps;
    let mut out = vec![Cf64::new(0.0, 0.0); n_out];
    for (k, &s) in symbols.iter().enumerate() {
        let peak = k * sps;
        let lo = peak.saturating_sub(half);
        let hi = (peak + half + 1).min(n_out);
        for (m, o) in out.iter_mut().enumerate().take(hi).skip(lo) {
            *o += s * taps[m + half - peak];
        }
    }
    Ok(out)
}
