use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::Cf64;

/// Direct O(N²) evaluation of `X[k] = Σ x[n]·exp(-i2πkn/N)` after
/// zero-padding `segment` to `nfft` points.
pub fn naive_dft(segment: &[Cf64], nfft: usize) -> Vec<Cf64> {
    assert!(segment.len() <= nfft, "segment longer than nfft");
    (0..nfft)
        .map(|k| {
            segment
                .iter()
                .enumerate()
                .map(|(n, &x)| {
                    // reduce kn mod N before scaling to keep the angle exact
                    let idx = (k * n) % nfft;
                    x * Cf64::from_polar(1.0, -2.0 * PI * idx as f64 / nfft as f64)
                })
                .sum()
        })
        .collect()
}

/// FFT of `segment` zero-padded to `nfft` points.
pub fn fft_spectrum(segment: &[Cf64], nfft: usize) -> Vec<Cf64> {
    assert!(segment.len() <= nfft, "segment longer than nfft");
    let mut buf = segment.to_vec();
    buf.resize(nfft, Cf64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    buf
}
