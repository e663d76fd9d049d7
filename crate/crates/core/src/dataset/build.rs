use std::fs;
use std::io::Cursor;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use image::DynamicImage;
use rayon::prelude::*;

use super::manifest::{sha256_hex, DatasetManifest, ImageShape, ManifestEntry};
use super::split::image_to_pixels;
use super::{kfold_split, DatasetConfig, Sample, SnrLayout};
use crate::channel::apply_channel;
use crate::seed::{self, stage};
use crate::stft::{render_image, StftEngine};
use crate::wavegen::{synthesize_clean_frame, ModulationScheme};
use crate::{Error, Result};

/// `snr_<db>/<scheme>/<frame_seed as 16 hex digits>.png`
pub fn entry_path(snr_db: i32, scheme: ModulationScheme, frame_seed: u64) -> String {
    format!("snr_{snr_db}/{}/{frame_seed:016x}.png", scheme.name())
}

#[derive(Debug, Clone, Copy)]
struct Job {
    label: usize,
    scheme: ModulationScheme,
    snr_db: i32,
    frame_index: u64,
}

fn jobs(cfg: &DatasetConfig) -> Vec<Job> {
    let spc = cfg.samples_per_class;
    let mut out = Vec::with_capacity(cfg.expected_entries());
    match cfg.layout {
        SnrLayout::PerSnr => {
            for (slot, &snr_db) in cfg.snr_list_db.iter().enumerate() {
                for (label, &scheme) in cfg.schemes.iter().enumerate() {
                    for i in 0..spc {
                        out.push(Job {
                            label,
                            scheme,
                            snr_db,
                            frame_index: (slot * spc + i) as u64,
                        });
                    }
                }
            }
        }
        SnrLayout::Mixed => {
            for (label, &scheme) in cfg.schemes.iter().enumerate() {
                for i in 0..spc {
                    out.push(Job {
                        label,
                        scheme,
                        snr_db: cfg.snr_list_db[i % cfg.snr_list_db.len()],
                        frame_index: i as u64,
                    });
                }
            }
        }
    }
    out
}

/// The full per-sample chain: clean frame → channel → spectrogram → image.
/// Returns the image and the frame seed.
fn render_job(
    cfg: &DatasetConfig,
    engine: &StftEngine,
    scheme: ModulationScheme,
    snr_db: i32,
    frame_index: u64,
) -> Result<(DynamicImage, u64)> {
    let clean = synthesize_clean_frame(scheme, &cfg.frame_spec(), frame_index)?;
    let channel_seed = seed::derive(clean.frame_seed, &[stage::CHANNEL]);
    let ch = cfg.channel.sample(Some(snr_db as f64), channel_seed);
    let rx = apply_channel(&clean, &ch)?;
    let spec = engine.compute(&rx)?;
    let img = render_image(&spec, cfg.image_height, cfg.image_width, cfg.palette)?;
    Ok((img, clean.frame_seed))
}

/// Produces the same pixels the dataset build would write for
/// `(scheme, snr_db, frame_index)`, without touching the filesystem.
/// `label` is copied into the sample unchanged.
pub fn synthesize_sample(
    cfg: &DatasetConfig,
    scheme: ModulationScheme,
    label: usize,
    snr_db: i32,
    frame_index: u64,
) -> Result<Sample> {
    let engine = StftEngine::new(cfg.spectrogram.clone())?;
    let (img, _) = render_job(cfg, &engine, scheme, snr_db, frame_index)?;
    Ok(Sample {
        pixels: image_to_pixels(&img, cfg.channels()),
        label,
        snr_db,
    })
}

fn run_job(
    cfg: &DatasetConfig,
    engine: &StftEngine,
    root: &Path,
    job: Job,
) -> Result<ManifestEntry> {
    let (img, frame_seed) = render_job(cfg, engine, job.scheme, job.snr_db, job.frame_index)?;
    let mut png = Vec::new();
    img.write_to(&mut Cursor::new(&mut png), image::ImageFormat::Png)?;

    let rel = entry_path(job.snr_db, job.scheme, frame_seed);
    let path = root.join(&rel);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(&path, &png).map_err(|e| Error::io(&path, e))?;
    Ok(ManifestEntry {
        path: rel,
        scheme: job.scheme,
        label: job.label,
        snr_db: job.snr_db,
        frame_seed,
        fold: None,
        sha256: sha256_hex(&png),
    })
}

/// Synthesizes, impairs, transforms and renders every configured sample
/// under `root`, then writes the manifest. Output is independent of `jobs`.
pub fn build_dataset(cfg: &DatasetConfig, root: &Path, jobs_n: usize) -> Result<DatasetManifest> {
    cfg.validate()?;
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let engine = StftEngine::new(cfg.spectrogram.clone())?;
    let work = jobs(cfg);
    let total = work.len();
    let written = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs_n.max(1))
        .build()
        .map_err(|e| Error::param(e.to_string()))?;
    let entries: Result<Vec<ManifestEntry>> = pool.install(|| {
        work.par_iter()
            .map(|&job| {
                let e = run_job(cfg, &engine, root, job)?;
                written.fetch_add(1, Ordering::Relaxed);
                Ok(e)
            })
            .collect()
    });
    let entries = entries.map_err(|source| Error::Build {
        written: written.load(Ordering::Relaxed),
        total,
        source: Box::new(source),
    })?;

    let shape = ImageShape {
        height: cfg.image_height,
        width: cfg.image_width,
        channels: cfg.channels(),
    };
    let mut manifest = DatasetManifest::new(cfg.clone(), shape, entries);
    if let Some(k) = cfg.folds {
        manifest = kfold_split(&manifest, k, cfg.master_seed)?;
    }
    manifest.write(root)?;
    Ok(manifest)
}
