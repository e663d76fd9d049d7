//! Raw spectrogram export: `<name>` holds `n_frames × n_bins` f32 LE values
//! row-major; `<name>.desc` is a `key = value` text descriptor.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Spectrogram, WindowKind};
use crate::{Error, Result};

pub type RawDescriptor = BTreeMap<String, String>;

fn descriptor_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".desc");
    PathBuf::from(p)
}

pub fn write_raw(spec: &Spectrogram, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = spec
        .magnitudes_db
        .iter()
        .flat_map(|&v| (v as f32).to_le_bytes())
        .collect();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;

    let cfg = &spec.config;
    let window = match cfg.window {
        WindowKind::Kaiser { beta } => format!("kaiser({beta})"),
        WindowKind::Hann => "hann".into(),
        WindowKind::Rectangular => "rectangular".into(),
    };
    let mut desc = format!(
        "format = f32le\nlayout = row-major\nn_frames = {}\nn_bins = {}\ndelta_t_s = {}\n\
         sample_rate_hz = {}\nwindow = {window}\nwindow_len = {}\noverlap = {}\nnfft = {}\n\
         db_floor = {}\ntwo_sided = {}\n",
        spec.n_frames,
        spec.n_bins,
        spec.delta_t,
        spec.sample_rate_hz,
        cfg.window_len,
        cfg.overlap,
        cfg.nfft,
        cfg.db_floor,
        cfg.two_sided,
    );
    if let Some(s) = spec.scheme {
        desc.push_str(&format!("scheme = {s}\n"));
    }
    if let Some(snr) = spec.snr_db {
        desc.push_str(&format!("snr_db = {snr}\n"));
    }
    if let Some(seed) = spec.frame_seed {
        desc.push_str(&format!("frame_seed = {seed}\n"));
    }
    let dpath = descriptor_path(path);
    fs::write(&dpath, desc).map_err(|e| Error::io(dpath, e))
}

/// Reads values and descriptor back; the value count must match the
/// descriptor's dimensions.
pub fn read_raw(path: &Path) -> Result<(Vec<f32>, RawDescriptor)> {
    let dpath = descriptor_path(path);
    let text = fs::read_to_string(&dpath).map_err(|e| Error::io(&dpath, e))?;
    let desc: RawDescriptor = text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    let dim = |key: &str| -> Result<usize> {
        desc.get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Format {
                path: dpath.clone(),
                reason: format!("missing or bad {key}"),
            })
    };
    let expected = dim("n_frames")? * dim("n_bins")?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != expected * 4 {
        return Err(Error::Format {
            path: path.into(),
            reason: format!("{} bytes, expected {}", bytes.len(), expected * 4),
        });
    }
    let values = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok((values, desc))
}
