//! Spectrogram-based automatic modulation classification.
//!
//! The crate is organised as a pipeline:
//!
//! * [`wavegen`] synthesizes clean complex-baseband frames for eleven
//!   analog and digital modulation schemes.
//! * [`channel`] applies multipath fading, sample-rate offset, carrier
//!   offset and additive white Gaussian noise.
//! * [`stft`] turns frames into low-resolution spectrograms, renders them as
//!   images and models the computational savings of the reduced FFT size.
//! * [`dataset`] builds labelled, content-addressed image datasets with
//!   stratified k-fold splits.
//! * [`dnn`] is a small from-scratch CNN with an Adam trainer, early
//!   stopping and confusion-matrix evaluation.

pub mod channel;
pub mod dataset;
pub mod dnn;
mod error;
pub mod seed;
pub mod stft;
pub mod wavegen;

pub use error::{Error, Result};

pub use channel::{ChannelConfig, ChannelRanges, FadingSpec};
pub use dataset::{DatasetConfig, DatasetManifest, SnrLayout};
pub use dnn::{ConfusionMatrix, NetSpec, TrainConfig};
pub use stft::{CostModel, CostReport, Spectrogram, SpectrogramConfig, WindowKind};
pub use wavegen::{FrameSpec, IqFrame, ModulationScheme, SchemeKind};

/// Complex sample type used throughout the pipeline.
pub type Cf64 = num_complex::Complex<f64>;
