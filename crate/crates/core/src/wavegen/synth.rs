use std::f64::consts::PI;

use rand::Rng;

use super::analog::{analytic_signal, synth_analog_source};
use super::constellation::{bits_per_symbol, map_symbols};
use super::rrc::pulse_shape;
use super::{mean_power, FrameSpec, IqFrame, ModulationScheme};
use crate::seed::{self, stage};
use crate::{Cf64, Result};

/// Seed of frame `frame_index` of `scheme` under `master_seed`.
pub fn frame_seed(master_seed: u64, scheme: ModulationScheme, frame_index: u64) -> u64 {
    seed::derive(
        master_seed,
        &[stage::FRAME, scheme.index() as u64, frame_index],
    )
}

/// Synthesizes one clean, unit-power frame. The result depends only on
/// `(spec, scheme, frame_index)`.
pub fn synthesize_clean_frame(
    scheme: ModulationScheme,
    spec: &FrameSpec,
    frame_index: u64,
) -> Result<IqFrame> {
    spec.validate()?;
    let fseed = frame_seed(spec.master_seed, scheme, frame_index);
    let mut rng = seed::rng(fseed);
    let n = spec.frame_length_samples;
    let sps = spec.samples_per_symbol;
    // guard symbols on each side keep filter transients out of the frame
    let guard = spec.rrc_span_symbols / 2;
    let n_sym = spec.symbols_per_frame() + 2 * guard;

    let mut samples = match scheme {
        s if s.is_linear() => {
            let bps = bits_per_symbol(s).expect("linear scheme");
            let bits: Vec<u8> = (0..n_sym * bps).map(|_| rng.random_range(0..2u8)).collect();
            let symbols = map_symbols(&bits, s)?;
            let shaped = pulse_shape(&symbols, spec)?;
            shaped[guard * sps..guard * sps + n].to_vec()
        }
        ModulationScheme::Cpfsk => {
            let freq: Vec<f64> = (0..spec.symbols_per_frame())
                .flat_map(|_| {
                    let a = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    std::iter::repeat_n(a, sps)
                })
                .collect();
            fm_from_frequency(&freq, PI * spec.cpfsk_mod_index / sps as f64)
        }
        ModulationScheme::Gfsk => {
            let nrz: Vec<f64> = (0..n_sym)
                .flat_map(|_| {
                    let a = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    std::iter::repeat_n(a, sps)
                })
                .collect();
            let g = gaussian_taps(spec.gfsk_bt, sps, 4);
            let smooth = convolve_same(&nrz, &g);
            let full = fm_from_frequency(&smooth, PI * spec.gfsk_mod_index / sps as f64);
            full[guard * sps..guard * sps + n].to_vec()
        }
        ModulationScheme::Wbfm => {
            let m = synth_analog_source(n, spec.sample_rate_hz, rng.random());
            fm_from_frequency(&m, 2.0 * PI * spec.wbfm_deviation_hz / spec.sample_rate_hz)
        }
        ModulationScheme::AmDsb => synth_analog_source(n, spec.sample_rate_hz, rng.random())
            .into_iter()
            .map(|m| Cf64::new(1.0 + spec.am_mod_index * m, 0.0))
            .collect(),
        ModulationScheme::AmSsb => {
            analytic_signal(&synth_analog_source(n, spec.sample_rate_hz, rng.random()))
        }
        _ => unreachable!("all schemes covered"),
    };

    let p = mean_power(&samples);
    if p > 0.0 {
        let g = p.sqrt().recip();
        samples.iter_mut().for_each(|s| *s *= g);
    }
    Ok(IqFrame {
        samples,
        scheme,
        snr_db: None,
        frame_seed: fseed,
        sample_rate_hz: spec.sample_rate_hz,
    })
}

/// Integrates an instantaneous-frequency sequence (radians/sample after
/// scaling by `gain`) into a unit-modulus phasor.
fn fm_from_frequency(freq: &[f64], gain: f64) -> Vec<Cf64> {
    let mut phase = 0.0f64;
    freq.iter()
        .map(|&f| {
            let s = Cf64::from_polar(1.0, phase);
            phase = (phase + gain * f).rem_euclid(2.0 * PI);
            s
        })
        .collect()
}

/// Gaussian frequency-pulse filter with bandwidth-time product `bt`,
/// spanning `span` symbols, normalized to unit DC gain.
fn gaussian_taps(bt: f64, sps: usize, span: usize) -> Vec<f64> {
    let len = span * sps + 1;
    let c = (len - 1) as f64 / 2.0;
    let sigma = (2f64.ln()).sqrt() / (2.0 * PI * bt);
    let mut g: Vec<f64> = (0..len)
        .map(|i| {
            let t = (i as f64 - c) / sps as f64;
            (-t * t / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= sum);
    g
}

fn convolve_same(x: &[f64], h: &[f64]) -> Vec<f64> {
    let half = (h.len() - 1) / 2;
    (0..x.len())
        .map(|n| {
            h.iter()
                .enumerate()
                .filter_map(|(j, &hj)| {
                    let idx = (n + half).checked_sub(j)?;
                    x.get(idx).map(|&v| v * hj)
                })
                .sum()
        })
        .collect()
}
