//! Binary IQ archive.
//!
//! ```text
//! magic       4 bytes  "IQF1"
//! frame count u32 LE
//! frame len   u32 LE   (complex samples per frame)
//! sample rate f64 LE   (Hz)
//! body        count × len × (I f32 LE, Q f32 LE)
//! ```
//!
//! The sidecar `<archive>.meta` holds one line per frame:
//! `index scheme snr_db frame_seed`, with `clean` for a noise-free frame.
//! Lines starting with `#` are comments.

use std::fs;
use std::path::{Path, PathBuf};

use crate::wavegen::IqFrame;
use crate::{Cf64, Error, Result};

pub const IQ_MAGIC: &[u8; 4] = b"IQF1";
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

fn sidecar(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta");
    PathBuf::from(p)
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Writes frames (all of one length and sample rate) with f32 precision.
pub fn write_iq_archive(path: &Path, frames: &[IqFrame]) -> Result<()> {
    let len = frames.first().map_or(0, IqFrame::len);
    let fs_hz = frames.first().map_or(0.0, |f| f.sample_rate_hz);
    if frames
        .iter()
        .any(|f| f.len() != len || f.sample_rate_hz != fs_hz)
    {
        return Err(Error::param(
            "archive frames must share length and sample rate",
        ));
    }
    let count = u32::try_from(frames.len()).map_err(|_| Error::param("too many frames"))?;
    let len32 = u32::try_from(len).map_err(|_| Error::param("frame too long"))?;

    let mut bytes = Vec::with_capacity(HEADER_LEN + frames.len() * len * 8);
    bytes.extend_from_slice(IQ_MAGIC);
    bytes.extend_from_slice(&count.to_le_bytes());
    bytes.extend_from_slice(&len32.to_le_bytes());
    bytes.extend_from_slice(&fs_hz.to_le_bytes());
    for f in frames {
        for s in &f.samples {
            bytes.extend_from_slice(&(s.re as f32).to_le_bytes());
            bytes.extend_from_slice(&(s.im as f32).to_le_bytes());
        }
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;

    let mut meta = String::from("# index scheme snr_db frame_seed\n");
    for (i, f) in frames.iter().enumerate() {
        let snr = f
            .snr_db
            .map_or_else(|| "clean".to_string(), |v| v.to_string());
        meta.push_str(&format!("{i} {} {snr} {}\n", f.scheme, f.frame_seed));
    }
    let mpath = sidecar(path);
    fs::write(&mpath, meta).map_err(|e| Error::io(mpath, e))
}

/// Reads an archive and its sidecar. Any structural problem fails the whole
/// read; no partial frame list is returned.
pub fn ingest_iq_archive(path: &Path) -> Result<Vec<IqFrame>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < HEADER_LEN {
        return Err(format_err(path, "file shorter than header"));
    }
    if &bytes[..4] != IQ_MAGIC {
        return Err(format_err(path, "bad magic"));
    }
    let count = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let fs_hz = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let body = &bytes[HEADER_LEN..];
    let expected = count
        .checked_mul(len)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| format_err(path, "header sizes overflow"))?;
    if body.len() != expected {
        return Err(format_err(
            path,
            format!("body has {} bytes, header implies {expected}", body.len()),
        ));
    }
    if !(fs_hz.is_finite() && fs_hz > 0.0) {
        return Err(format_err(path, "bad sample rate"));
    }

    let mpath = sidecar(path);
    let meta = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let records: Vec<&str> = meta
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if records.len() != count {
        return Err(format_err(
            &mpath,
            format!("{} records for {count} frames", records.len()),
        ));
    }

    let mut frames = Vec::with_capacity(count);
    for (i, (rec, chunk)) in records.iter().zip(body.chunks_exact(len * 8)).enumerate() {
        let fields: Vec<&str> = rec.split_whitespace().collect();
        let [idx, scheme, snr, seed] = fields[..] else {
            return Err(format_err(&mpath, format!("malformed record {rec:?}")));
        };
        if idx.parse::<usize>().ok() != Some(i) {
            return Err(format_err(&mpath, format!("record {i} has index {idx}")));
        }
        let scheme = scheme
            .parse()
            .map_err(|_| format_err(&mpath, format!("bad scheme {scheme}")))?;
        let snr_db = match snr {
            "clean" => None,
            v => Some(
                v.parse()
                    .map_err(|_| format_err(&mpath, format!("bad snr {v}")))?,
            ),
        };
        let frame_seed = seed
            .parse()
            .map_err(|_| format_err(&mpath, format!("bad seed {seed}")))?;
        let samples = chunk
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes(c[..4].try_into().unwrap());
                let im = f32::from_le_bytes(c[4..].try_into().unwrap());
                Cf64::new(re as f64, im as f64)
            })
            .collect();
        frames.push(IqFrame {
            samples,
            scheme,
            snr_db,
            frame_seed,
            sample_rate_hz: fs_hz,
        });
    }
    Ok(frames)
}
