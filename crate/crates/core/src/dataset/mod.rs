//! Labelled spectrogram-image datasets: construction, manifests, stratified
//! k-fold assignment, split loading and the raw IQ archive format.

mod build;
mod iq_archive;
mod kfold;
mod manifest;
mod split;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRanges;
use crate::stft::{Palette, SpectrogramConfig};
use crate::wavegen::{FrameSpec, ModulationScheme};
use crate::{Error, Result};

pub use build::{build_dataset, entry_path, synthesize_sample};
pub use iq_archive::{ingest_iq_archive, write_iq_archive, IQ_MAGIC};
pub use kfold::kfold_split;
pub use manifest::{sha256_hex, DatasetManifest, ImageShape, ManifestEntry, MANIFEST_FILE};
pub use split::{load_entries, load_split, Sample};

/// How SNR levels are laid out across the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrLayout {
    /// A full `samples_per_class` set for every SNR in the list.
    #[default]
    PerSnr,
    /// `samples_per_class` in total per class, SNRs assigned round-robin.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub schemes: Vec<ModulationScheme>,
    pub samples_per_class: usize,
    pub snr_list_db: Vec<i32>,
    pub layout: SnrLayout,
    /// Overrides `frame.master_seed` during the build.
    pub master_seed: u64,
    pub frame: FrameSpec,
    pub channel: ChannelRanges,
    pub spectrogram: SpectrogramConfig,
    pub image_height: usize,
    pub image_width: usize,
    pub palette: Palette,
    /// Fold count assigned after the build; `None` leaves entries unassigned.
    pub folds: Option<usize>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            schemes: ModulationScheme::ALL.to_vec(),
            samples_per_class: 1940,
            snr_list_db: vec![5, 10, 15, 20, 25, 30],
            layout: SnrLayout::PerSnr,
            master_seed: FrameSpec::default().master_seed,
            frame: FrameSpec::default(),
            channel: ChannelRanges::default(),
            spectrogram: SpectrogramConfig::transformed(),
            image_height: 64,
            image_width: 64,
            palette: Palette::Grayscale,
            folds: Some(5),
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::param("dataset needs at least one scheme"));
        }
        let mut seen = self.schemes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.schemes.len() {
            return Err(Error::param("duplicate scheme in dataset config"));
        }
        if self.samples_per_class == 0 {
            return Err(Error::param("samples_per_class must be >= 1"));
        }
        if self.snr_list_db.is_empty() {
            return Err(Error::param("snr_list_db must not be empty"));
        }
        if self.image_height == 0 || self.image_width == 0 {
            return Err(Error::param("image size must be positive"));
        }
        if let Some(k) = self.folds {
            if k < 2 {
                return Err(Error::param("fold count must be >= 2"));
            }
        }
        self.frame_spec().validate()?;
        self.spectrogram.validate()?;
        if self.frame.frame_length_samples < self.spectrogram.window_len {
            return Err(Error::TooShort {
                len: self.frame.frame_length_samples,
                window: self.spectrogram.window_len,
            });
        }
        Ok(())
    }

    pub fn frame_spec(&self) -> FrameSpec {
        FrameSpec {
            master_seed: self.master_seed,
            ..self.frame.clone()
        }
    }

    /// Number of entries the build produces.
    pub fn expected_entries(&self) -> usize {
        let per_layout = self.schemes.len() * self.samples_per_class;
        match self.layout {
            SnrLayout::PerSnr => per_layout * self.snr_list_db.len(),
            SnrLayout::Mixed => per_layout,
        }
    }

    pub fn channels(&self) -> usize {
        match self.palette {
            Palette::Grayscale => 1,
            Palette::Colormapped => 3,
        }
    }
}
