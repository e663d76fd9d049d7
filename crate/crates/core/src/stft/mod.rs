//! Short-time Fourier transform spectrograms and the resolution
//! transformation from 8192-point to 32-point analysis.
//!
//! Frame bookkeeping follows three relations:
//!
//! * number of STFT frames: `1 + ceil((SL - W) / (W - O))`
//! * time resolution: `Δt = W / fs`
//! * acquisition span: `T = N / fs`
//!
//! where `SL` is the signal length, `W` the window length, `O` the overlap
//! and `N` the number of samples acquired.

mod config;
mod cost;
mod dft;
mod engine;
mod length;
mod raw;
mod render;
pub mod speed;
mod window;

pub use config::{SpectrogramConfig, WindowKind};
pub use cost::{cost_report, CostModel, CostReport};
pub use dft::{fft_spectrum, naive_dft};
pub use engine::{compute_spectrogram, Spectrogram, StftEngine};
pub use length::{acquisition_time, spectrogram_length, time_resolution};
pub use raw::{read_raw, write_raw, RawDescriptor};
pub(crate) use render::colormap;
pub use render::{normalized_grid, quantized_grid, render_image, Palette};
pub use window::{bessel_i0, window};
