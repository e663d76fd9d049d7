//! Spectrogram → 8-bit image.
//!
//! Orientation: image rows are frequency bins with the highest frequency at
//! the top, columns are STFT frames in time order.

use image::{DynamicImage, GrayImage, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use super::Spectrogram;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    #[default]
    Grayscale,
    Colormapped,
}

/// Per-image min–max scaling of the dB grid onto `[0, 255]`, laid out as
/// `[n_bins × n_frames]` (see module docs). A constant grid maps to 128.
pub fn normalized_grid(spec: &Spectrogram) -> Result<Vec<f64>> {
    if spec.n_frames == 0 || spec.n_bins == 0 {
        return Err(Error::EmptyInput("spectrogram has no cells"));
    }
    let (lo, hi) = spec
        .magnitudes_db
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let (rows, cols) = (spec.n_bins, spec.n_frames);
    let mut grid = vec![0.0; rows * cols];
    for t in 0..cols {
        for b in 0..rows {
            let v = spec.get(t, b);
            let r = rows - 1 - b;
            grid[r * cols + t] = if range > 0.0 {
                255.0 * (v - lo) / range
            } else {
                128.0
            };
        }
    }
    Ok(grid)
}

/// [`normalized_grid`] rounded to bytes, before any resizing.
pub fn quantized_grid(spec: &Spectrogram) -> Result<Vec<u8>> {
    Ok(normalized_grid(spec)?.into_iter().map(to_byte).collect())
}

fn to_byte(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Bilinear resize with pixel-center alignment.
fn resize_bilinear(src: &[f64], rows: usize, cols: usize, out_h: usize, out_w: usize) -> Vec<f64> {
    let coord = |i: usize, n_in: usize, n_out: usize| -> (usize, usize, f64) {
        let x = ((i as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).clamp(0.0, (n_in - 1) as f64);
        let x0 = x.floor() as usize;
        let x1 = (x0 + 1).min(n_in - 1);
        (x0, x1, x - x0 as f64)
    };
    let mut out = Vec::with_capacity(out_h * out_w);
    for i in 0..out_h {
        let (r0, r1, fr) = coord(i, rows, out_h);
        for j in 0..out_w {
            let (c0, c1, fc) = coord(j, cols, out_w);
            let top = src[r0 * cols + c0] * (1.0 - fc) + src[r0 * cols + c1] * fc;
            let bot = src[r1 * cols + c0] * (1.0 - fc) + src[r1 * cols + c1] * fc;
            out.push(top * (1.0 - fr) + bot * fr);
        }
    }
    out
}

/// Five-anchor perceptual blue→green→yellow map.
pub(crate) fn colormap(v: u8) -> Rgb<u8> {
    const ANCHORS: [[f64; 3]; 5] = [
        [68.0, 1.0, 84.0],
        [59.0, 82.0, 139.0],
        [33.0, 145.0, 140.0],
        [94.0, 201.0, 98.0],
        [253.0, 231.0, 37.0],
    ];
    let x = v as f64 / 255.0 * 4.0;
    let i = (x.floor() as usize).min(3);
    let f = x - i as f64;
    let c = |k: usize| to_byte(ANCHORS[i][k] * (1.0 - f) + ANCHORS[i + 1][k] * f);
    Rgb([c(0), c(1), c(2)])
}

pub fn render_image(
    spec: &Spectrogram,
    out_height: usize,
    out_width: usize,
    palette: Palette,
) -> Result<DynamicImage> {
    if out_height == 0 || out_width == 0 {
        return Err(Error::param("output image must be non-empty"));
    }
    let grid = normalized_grid(spec)?;
    let pixels: Vec<u8> = resize_bilinear(&grid, spec.n_bins, spec.n_frames, out_height, out_width)
        .into_iter()
        .map(to_byte)
        .collect();
    let (w, h) = (out_width as u32, out_height as u32);
    Ok(match palette {
        Palette::Grayscale => {
            DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, pixels).expect("buffer size"))
        }
        Palette::Colormapped => {
            let mut img = RgbImage::new(w, h);
            for (p, v) in img.pixels_mut().zip(pixels) {
                *p = colormap(v);
            }
            DynamicImage::ImageRgb8(img)
        }
    })
}
