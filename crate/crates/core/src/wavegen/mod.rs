//! Clean baseband waveform synthesis for the eleven modulation classes.

mod analog;
mod constellation;
mod rrc;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Cf64, Error, Result};

pub use analog::{analytic_signal, synth_analog_source, ANALOG_BANDWIDTH_HZ};
pub use constellation::{alphabet, bits_per_symbol, map_symbols};
pub use rrc::{pulse_shape, rrc_taps};
pub use synth::{frame_seed, synthesize_clean_frame};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Digital,
    Analog,
}

/// The eleven modulation classes. Discriminants are the class labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModulationScheme {
    Bpsk = 0,
    Qpsk = 1,
    Psk8 = 2,
    Qam16 = 3,
    Qam64 = 4,
    Gfsk = 5,
    Cpfsk = 6,
    Pam4 = 7,
    Wbfm = 8,
    AmSsb = 9,
    AmDsb = 10,
}

impl ModulationScheme {
    pub const ALL: [ModulationScheme; 11] = [
        Self::Bpsk,
        Self::Qpsk,
        Self::Psk8,
        Self::Qam16,
        Self::Qam64,
        Self::Gfsk,
        Self::Cpfsk,
        Self::Pam4,
        Self::Wbfm,
        Self::AmSsb,
        Self::AmDsb,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn kind(self) -> SchemeKind {
        match self {
            Self::Wbfm | Self::AmSsb | Self::AmDsb => SchemeKind::Analog,
            _ => SchemeKind::Digital,
        }
    }

    /// Canonical label, also used as a directory name.
    pub fn name(self) -> &'static str {
        match self {
            Self::Bpsk => "BPSK",
            Self::Qpsk => "QPSK",
            Self::Psk8 => "8PSK",
            Self::Qam16 => "QAM16",
            Self::Qam64 => "QAM64",
            Self::Gfsk => "GFSK",
            Self::Cpfsk => "CPFSK",
            Self::Pam4 => "PAM4",
            Self::Wbfm => "WBFM",
            Self::AmSsb => "AM-SSB",
            Self::AmDsb => "AM-DSB",
        }
    }

    /// True for schemes produced by a memoryless bits-to-symbol mapping.
    pub fn is_linear(self) -> bool {
        matches!(
            self,
            Self::Bpsk | Self::Qpsk | Self::Psk8 | Self::Qam16 | Self::Qam64 | Self::Pam4
        )
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModulationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        let scheme = match key.as_str() {
            "BPSK" => Self::Bpsk,
            "QPSK" => Self::Qpsk,
            "8PSK" | "PSK8" => Self::Psk8,
            "QAM16" | "16QAM" => Self::Qam16,
            "QAM64" | "64QAM" => Self::Qam64,
            "GFSK" => Self::Gfsk,
            "CPFSK" => Self::Cpfsk,
            "PAM4" | "4PAM" => Self::Pam4,
            "WBFM" => Self::Wbfm,
            "AMSSB" => Self::AmSsb,
            "AMDSB" => Self::AmDsb,
            _ => return Err(Error::param(format!("unknown modulation scheme {s:?}"))),
        };
        Ok(scheme)
    }
}

impl TryFrom<String> for ModulationScheme {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModulationScheme> for String {
    fn from(s: ModulationScheme) -> String {
        s.name().to_string()
    }
}

/// Framing and transmitter parameters shared by all schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSpec {
    pub frame_length_samples: usize,
    pub samples_per_symbol: usize,
    pub sample_rate_hz: f64,
    pub rrc_rolloff: f64,
    /// Total RRC filter span in symbols.
    pub rrc_span_symbols: usize,
    pub cpfsk_mod_index: f64,
    pub gfsk_mod_index: f64,
    pub gfsk_bt: f64,
    pub wbfm_deviation_hz: f64,
    pub am_mod_index: f64,
    pub master_seed: u64,
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self {
            frame_length_samples: 1024,
            samples_per_symbol: 8,
            sample_rate_hz: 200_000.0,
            rrc_rolloff: 0.35,
            rrc_span_symbols: 8,
            cpfsk_mod_index: 0.5,
            gfsk_mod_index: 0.5,
            gfsk_bt: 0.35,
            wbfm_deviation_hz: 75_000.0,
            am_mod_index: 0.5,
            master_seed: 0x5EED_2016,
        }
    }
}

impl FrameSpec {
    pub fn validate(&self) -> Result<()> {
        if self.frame_length_samples == 0 {
            return Err(Error::param("frame_length_samples must be positive"));
        }
        if self.samples_per_symbol < 2 {
            return Err(Error::param("samples_per_symbol must be at least 2"));
        }
        if self.frame_length_samples % self.samples_per_symbol != 0 {
            return Err(Error::param(format!(
                "frame length {} is not a multiple of samples_per_symbol {}",
                self.frame_length_samples, self.samples_per_symbol
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::param("sample_rate_hz must be positive"));
        }
        if !(self.rrc_rolloff > 0.0 && self.rrc_rolloff <= 1.0) {
            return Err(Error::param("rrc_rolloff must lie in (0, 1]"));
        }
        if self.rrc_span_symbols == 0 || self.rrc_span_symbols % 2 != 0 {
            return Err(Error::param(
                "rrc_span_symbols must be a positive even count",
            ));
        }
        for (name, v) in [
            ("cpfsk_mod_index", self.cpfsk_mod_index),
            ("gfsk_mod_index", self.gfsk_mod_index),
            ("gfsk_bt", self.gfsk_bt),
            ("am_mod_index", self.am_mod_index),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("{name} must be positive")));
            }
        }
        if !(self.wbfm_deviation_hz > 0.0 && self.wbfm_deviation_hz < self.sample_rate_hz / 2.0) {
            return Err(Error::param("wbfm_deviation_hz must lie in (0, fs/2)"));
        }
        Ok(())
    }

    pub fn symbols_per_frame(&self) -> usize {
        self.frame_length_samples / self.samples_per_symbol
    }

    /// Acquisition span of one frame in seconds.
    pub fn frame_duration_s(&self) -> f64 {
        self.frame_length_samples as f64 / self.sample_rate_hz
    }
}

/// One complex baseband frame with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub samples: Vec<Cf64>,
    pub scheme: ModulationScheme,
    /// `None` for a clean (noise-free) frame.
    pub snr_db: Option<f64>,
    pub frame_seed: u64,
    pub sample_rate_hz: f64,
}

impl IqFrame {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        mean_power(&self.samples)
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Same metadata, new samples.
    pub fn with_samples(&self, samples: Vec<Cf64>) -> Self {
        Self {
            samples,
            ..self.clone()
        }
    }
}

pub(crate) fn mean_power(x: &[Cf64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_schemes_eight_digital() {
        assert_eq!(ModulationScheme::ALL.len(), 11);
        let digital = ModulationScheme::ALL
            .iter()
            .filter(|s| s.kind() == SchemeKind::Digital)
            .count();
        assert_eq!(digital, 8);
        for (i, s) in ModulationScheme::ALL.iter().enumerate() {
            assert_eq!(s.index(), i);
            assert_eq!(ModulationScheme::from_index(i), Some(*s));
            assert_eq!(s.name().parse::<ModulationScheme>().unwrap(), *s);
        }
    }

    #[test]
    fn default_frame_spec() {
        let spec = FrameSpec::default();
        spec.validate().unwrap();
        assert_eq!(spec.symbols_per_frame(), 128);
        assert!((spec.frame_duration_s() - 5.12e-3).abs() < 1e-15);
    }

    #[test]
    fn rejects_indivisible_frame() {
        let spec = FrameSpec {
            frame_length_samples: 1000,
            samples_per_symbol: 3,
            ..FrameSpec::default()
        };
        assert!(spec.validate().is_err());
    }
}
