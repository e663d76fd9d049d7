//! Gray-coded linear constellations, normalized to unit average power.

use std::f64::consts::PI;

use super::ModulationScheme;
use crate::{Cf64, Error, Result};

pub fn bits_per_symbol(scheme: ModulationScheme) -> Option<usize> {
    use ModulationScheme::*;
    match scheme {
        Bpsk => Some(1),
        Qpsk | Pam4 => Some(2),
        Psk8 => Some(3),
        Qam16 => Some(4),
        Qam64 => Some(6),
        _ => None,
    }
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = g;
    while g > 1 {
        g >>= 1;
        b ^= g;
    }
    b
}

/// Amplitude level of a Gray-coded `m`-ary PAM label, unnormalized
/// (odd integers `-(m-1)..=m-1`).
fn pam_level(label: usize, m: usize) -> f64 {
    (2 * gray_decode(label)) as f64 - (m as f64 - 1.0)
}

/// Constellation indexed by the symbol's bit pattern (MSB first).
pub fn alphabet(scheme: ModulationScheme) -> Result<Vec<Cf64>> {
    use ModulationScheme::*;
    let points: Vec<Cf64> = match scheme {
        Bpsk => vec![Cf64::new(1.0, 0.0), Cf64::new(-1.0, 0.0)],
        Qpsk => (0..4)
            .map(|v| {
                let i = 1.0 - 2.0 * ((v >> 1) & 1) as f64;
                let q = 1.0 - 2.0 * (v & 1) as f64;
                Cf64::new(i, q) / 2f64.sqrt()
            })
            .collect(),
        Psk8 => (0..8)
            .map(|v| Cf64::from_polar(1.0, 2.0 * PI * gray_decode(v) as f64 / 8.0))
            .collect(),
        Qam16 => square_qam(4),
        Qam64 => square_qam(8),
        Pam4 => (0..4)
            .map(|v| Cf64::new(pam_level(v, 4) / 5f64.sqrt(), 0.0))
            .collect(),
        other => return Err(Error::UnsupportedScheme(other.name().to_string())),
    };
    Ok(points)
}

/// `side`×`side` square QAM; high bits select I, low bits select Q.
fn square_qam(side: usize) -> Vec<Cf64> {
    let axis_bits = side.trailing_zeros() as usize;
    let m = side * side;
    // mean of (2l - (side-1))^2 over l, twice (I and Q)
    let norm = (2.0 * (side * side - 1) as f64 / 3.0).sqrt();
    (0..m)
        .map(|v| {
            let i = pam_level(v >> axis_bits, side);
            let q = pam_level(v & (side - 1), side);
            Cf64::new(i, q) / norm
        })
        .collect()
}

/// Maps a bit sequence (one `0`/`1` per element) onto constellation symbols.
pub fn map_symbols(bits: &[u8], scheme: ModulationScheme) -> Result<Vec<Cf64>> {
    let bps =
        bits_per_symbol(scheme).ok_or_else(|| Error::UnsupportedScheme(scheme.name().into()))?;
    if bits.len() % bps != 0 {
        return Err(Error::Length(format!(
            "{} bits is not a multiple of {bps} bits per {scheme} symbol",
            bits.len()
        )));
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::param(format!("bit value {b} is not 0 or 1")));
    }
    let table = alphabet(scheme)?;
    Ok(bits
        .chunks_exact(bps)
        .map(|chunk| {
            let v = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            table[v]
        })
        .collect())
}
