use std::path::Path;

use image::DynamicImage;

use super::DatasetManifest;
use super::ManifestEntry;
use crate::{Error, Result};

/// One decoded image, channel-major (`c × h × w`), values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub pixels: Vec<f64>,
    pub label: usize,
    pub snr_db: i32,
}

/// Channel-major `[0, 1]` pixels; `channels` must be 1 or 3.
pub(crate) fn image_to_pixels(img: &DynamicImage, channels: usize) -> Vec<f64> {
    if channels == 1 {
        return img
            .to_luma8()
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / 255.0)
            .collect();
    }
    let rgb = img.to_rgb8();
    let plane = (rgb.width() * rgb.height()) as usize;
    let mut out = vec![0.0; 3 * plane];
    for (i, px) in rgb.into_raw().chunks_exact(3).enumerate() {
        for c in 0..3 {
            out[c * plane + i] = px[c] as f64 / 255.0;
        }
    }
    out
}

fn decode(manifest: &DatasetManifest, root: &Path, entry: &ManifestEntry) -> Result<Sample> {
    let bytes = manifest.read_verified(root, entry)?;
    let path = root.join(&entry.path);
    let img = image::load_from_memory(&bytes).map_err(|e| Error::Integrity {
        path: path.clone(),
        reason: e.to_string(),
    })?;
    let shape = manifest.image;
    if img.height() as usize != shape.height || img.width() as usize != shape.width {
        return Err(Error::Integrity {
            path,
            reason: format!(
                "image is {}x{}, manifest says {}x{}",
                img.height(),
                img.width(),
                shape.height,
                shape.width
            ),
        });
    }
    if !matches!(shape.channels, 1 | 3) {
        return Err(Error::Format {
            path,
            reason: format!("unsupported channel count {}", shape.channels),
        });
    }
    let pixels = image_to_pixels(&img, shape.channels);
    Ok(Sample {
        pixels,
        label: entry.label,
        snr_db: entry.snr_db,
    })
}

/// Decodes (and digest-checks) every entry accepted by `keep`.
pub fn load_entries(
    manifest: &DatasetManifest,
    root: &Path,
    keep: impl Fn(&ManifestEntry) -> bool,
) -> Result<Vec<Sample>> {
    manifest
        .entries
        .iter()
        .filter(|e| keep(e))
        .map(|e| decode(manifest, root, e))
        .collect()
}

/// `(train, test)`: the test set is every entry in `test_fold`.
pub fn load_split(
    manifest: &DatasetManifest,
    root: &Path,
    test_fold: usize,
) -> Result<(Vec<Sample>, Vec<Sample>)> {
    let k = manifest
        .k
        .ok_or_else(|| Error::param("manifest has no fold assignment"))?;
    if test_fold >= k {
        return Err(Error::param(format!(
            "test fold {test_fold} out of range 0..{k}"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for e in &manifest.entries {
        let s = decode(manifest, root, e)?;
        if e.fold == Some(test_fold) {
            test.push(s);
        } else {
            train.push(s);
        }
    }
    Ok((train, test))
}
