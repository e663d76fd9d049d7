use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use specamc::dataset::SnrLayout;
use specamc::seed::{self, stage};
use specamc::stft::Palette;
use specamc::{
    ChannelRanges, DatasetConfig, FrameSpec, ModulationScheme, SpectrogramConfig, TrainConfig,
};

use crate::UsageError;

/// Everything a run needs. `seed` is the single source of randomness: it
/// overwrites the seeds of the frame, dataset and training sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub out: PathBuf,
    /// `transformed`, `highres`, or `custom` (reads `[spectrogram]`).
    pub preset: String,
    pub frame: FrameSpec,
    pub channel: ChannelRanges,
    pub spectrogram: SpectrogramConfig,
    pub dataset: DatasetSection,
    pub train: TrainConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub schemes: Vec<ModulationScheme>,
    pub samples_per_class: usize,
    pub snr_list_db: Vec<i32>,
    pub layout: SnrLayout,
    pub image_height: usize,
    pub image_width: usize,
    pub palette: Palette,
    pub folds: Option<usize>,
}

impl Default for DatasetSection {
    fn default() -> Self {
        let d = DatasetConfig::default();
        DatasetSection {
            schemes: d.schemes,
            samples_per_class: d.samples_per_class,
            snr_list_db: d.snr_list_db,
            layout: d.layout,
            image_height: d.image_height,
            image_width: d.image_width,
            palette: d.palette,
            folds: d.folds,
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let seed = FrameSpec::default().master_seed;
        let mut cfg = PipelineConfig {
            seed,
            out: PathBuf::from("specamc-out"),
            preset: "transformed".into(),
            frame: FrameSpec::default(),
            channel: ChannelRanges::default(),
            spectrogram: SpectrogramConfig::transformed(),
            dataset: DatasetSection::default(),
            train: TrainConfig::default(),
        };
        cfg.apply_seed(seed);
        cfg
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        if !path.is_file() {
            return Err(UsageError(format!("config file {} not found", path.display())).into());
        }
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| UsageError(format!("{}: {}", path.display(), e.message())))?;
        cfg.apply_seed(cfg.seed);
        Ok(cfg)
    }

    pub fn apply_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.frame.master_seed = seed;
        self.train.seed = seed::derive(seed, &[stage::SHUFFLE]);
    }

    /// The active spectrogram configuration; the named presets are fixed.
    pub fn spectrogram_config(&self) -> anyhow::Result<SpectrogramConfig> {
        match self.preset.as_str() {
            "custom" => Ok(self.spectrogram.clone()),
            name => SpectrogramConfig::preset(name).ok_or_else(|| {
                UsageError(format!(
                    "unknown preset {name:?} (transformed, highres, custom)"
                ))
                .into()
            }),
        }
    }

    pub fn dataset_config(&self) -> anyhow::Result<DatasetConfig> {
        let d = &self.dataset;
        Ok(DatasetConfig {
            schemes: d.schemes.clone(),
            samples_per_class: d.samples_per_class,
            snr_list_db: d.snr_list_db.clone(),
            layout: d.layout,
            master_seed: self.seed,
            frame: self.frame.clone(),
            channel: self.channel.clone(),
            spectrogram: self.spectrogram_config()?,
            image_height: d.image_height,
            image_width: d.image_width,
            palette: d.palette,
            folds: d.folds,
        })
    }

    pub fn net_init_seed(&self) -> u64 {
        seed::derive(self.seed, &[stage::INIT])
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let usage = |e: specamc::Error| UsageError(format!("invalid config: {e}"));
        self.frame.validate().map_err(usage)?;
        self.spectrogram_config()?.validate().map_err(usage)?;
        self.dataset_config()?.validate().map_err(usage)?;
        self.train.validate().map_err(usage)?;
        Ok(())
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn dataset_dir(&self) -> PathBuf {
        self.out.join("dataset")
    }

    pub fn models_dir(&self) -> PathBuf {
        self.out.join("models")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.out.join("reports")
    }
}
