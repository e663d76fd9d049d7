use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowKind {
    Kaiser { beta: f64 },
    Hann,
    Rectangular,
}

impl WindowKind {
    pub const DEFAULT_KAISER: WindowKind = WindowKind::Kaiser { beta: 8.0 };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrogramConfig {
    pub window: WindowKind,
    pub window_len: usize,
    pub overlap: usize,
    pub nfft: usize,
    pub db_floor: f64,
    /// DC-centered two-sided spectrum; one-sided keeps bins `0..=nfft/2`.
    #[serde(default = "default_two_sided")]
    pub two_sided: bool,
}

fn default_two_sided() -> bool {
    true
}

impl Default for SpectrogramConfig {
    fn default() -> Self {
        Self::transformed()
    }
}

impl SpectrogramConfig {
    /// Reduced-resolution configuration: W=8, O=4, NFFT=32, Kaiser(8).
    pub fn transformed() -> Self {
        Self {
            window: WindowKind::DEFAULT_KAISER,
            window_len: 8,
            overlap: 4,
            nfft: 32,
            db_floor: -120.0,
            two_sided: true,
        }
    }

    /// High-resolution reference: W=4096, O=3584 (87.5 %), NFFT=8192, Kaiser(8).
    pub fn highres() -> Self {
        Self {
            window: WindowKind::DEFAULT_KAISER,
            window_len: 4096,
            overlap: 3584,
            nfft: 8192,
            db_floor: -120.0,
            two_sided: true,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "transformed" => Some(Self::transformed()),
            "highres" => Some(Self::highres()),
            _ => None,
        }
    }

    pub fn hop(&self) -> usize {
        self.window_len - self.overlap
    }

    pub fn n_bins(&self) -> usize {
        if self.two_sided {
            self.nfft
        } else {
            self.nfft / 2 + 1
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_len == 0 {
            return Err(Error::param("window length must be positive"));
        }
        if self.overlap >= self.window_len {
            return Err(Error::Overlap {
                overlap: self.overlap,
                window: self.window_len,
            });
        }
        if self.window_len > self.nfft {
            return Err(Error::param(format!(
                "window {} longer than nfft {}",
                self.window_len, self.nfft
            )));
        }
        if !self.nfft.is_power_of_two() {
            return Err(Error::param(format!(
                "nfft {} is not a power of two",
                self.nfft
            )));
        }
        if !self.db_floor.is_finite() {
            return Err(Error::param("db_floor must be finite"));
        }
        if let WindowKind::Kaiser { beta } = self.window {
            if !(beta.is_finite() && beta >= 0.0) {
                return Err(Error::param("kaiser beta must be finite and >= 0"));
            }
        }
        Ok(())
    }
}
