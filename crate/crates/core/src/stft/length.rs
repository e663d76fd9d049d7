use crate::{Error, Result};

/// Number of STFT frames, `1 + ceil((SL - W) / (W - O))`.
pub fn spectrogram_length(signal_len: usize, window_len: usize, overlap: usize) -> Result<usize> {
    if overlap >= window_len {
        return Err(Error::Overlap {
            overlap,
            window: window_len,
        });
    }
    if signal_len < window_len {
        return Err(Error::TooShort {
            len: signal_len,
            window: window_len,
        });
    }
    let hop = window_len - overlap;
    Ok(1 + (signal_len - window_len).div_ceil(hop))
}

/// Width of one time bin, `W / fs`, in seconds.
pub fn time_resolution(window_len: usize, sample_rate_hz: f64) -> f64 {
    window_len as f64 / sample_rate_hz
}

/// Acquisition span of `n_samples` at `sample_rate_hz`, in seconds.
pub fn acquisition_time(n_samples: usize, sample_rate_hz: f64) -> f64 {
    n_samples as f64 / sample_rate_hz
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_counts() {
        assert_eq!(spectrogram_length(1024, 8, 4).unwrap(), 255);
        assert_eq!(spectrogram_length(1000, 100, 50).unwrap(), 19);
        assert_eq!(spectrogram_length(64, 64, 10).unwrap(), 1);
        assert_eq!(spectrogram_length(8192, 4096, 3584).unwrap(), 9);
    }

    #[test]
    fn frame_count_errors() {
        assert!(matches!(
            spectrogram_length(7, 8, 4),
            Err(Error::TooShort { .. })
        ));
        assert!(matches!(
            spectrogram_length(100, 8, 8),
            Err(Error::Overlap { .. })
        ));
    }

    #[test]
    fn times() {
        assert!((time_resolution(8, 200_000.0) - 40e-6).abs() < 1e-18);
        assert!((time_resolution(4096, 200_000.0) - 20.48e-3).abs() < 1e-15);
        assert_eq!(time_resolution(0, 200_000.0), 0.0);
        assert!((acquisition_time(1024, 200_000.0) - 5.12e-3).abs() < 1e-15);
        assert!((acquisition_time(8192, 200_000.0) - 40.96e-3).abs() < 1e-15);
        assert_eq!(acquisition_time(0, 200_000.0), 0.0);
    }
}
