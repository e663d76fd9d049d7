use serde::{Deserialize, Serialize};

use super::acquisition_time;
use crate::{Error, Result};

/// Operation-count model for one FFT of size N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostModel {
    /// cost ∝ N
    Linear,
    /// cost ∝ N·log₂N
    NLogN,
}

impl CostModel {
    pub fn cost(self, n: usize) -> f64 {
        match self {
            CostModel::Linear => n as f64,
            CostModel::NLogN => n as f64 * (n as f64).log2(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub nfft_hi: usize,
    pub nfft_lo: usize,
    pub model: CostModel,
    /// `100·(1 - cost(lo)/cost(hi))`
    pub reduction_pct: f64,
    /// Ratio of the acquisition spans behind the two configurations.
    pub span_ratio: Option<f64>,
    pub wall_clock_hi: Option<f64>,
    pub wall_clock_lo: Option<f64>,
}

impl CostReport {
    /// Attaches the acquisition-span ratio `T(len_hi) / T(len_lo)`.
    pub fn with_spans(mut self, len_hi: usize, len_lo: usize, sample_rate_hz: f64) -> Self {
        self.span_ratio = Some(
            acquisition_time(len_hi, sample_rate_hz) / acquisition_time(len_lo, sample_rate_hz),
        );
        self
    }

    pub fn with_wall_clock(mut self, hi_s: f64, lo_s: f64) -> Self {
        self.wall_clock_hi = Some(hi_s);
        self.wall_clock_lo = Some(lo_s);
        self
    }

    /// Reduction rounded to two decimals.
    pub fn reduction_pct_2dp(&self) -> f64 {
        (self.reduction_pct * 100.0).round() / 100.0
    }
}

pub fn cost_report(nfft_hi: usize, nfft_lo: usize, model: CostModel) -> Result<CostReport> {
    if !nfft_hi.is_power_of_two() || !nfft_lo.is_power_of_two() {
        return Err(Error::param(format!(
            "nfft values {nfft_hi}, {nfft_lo} must be powers of two"
        )));
    }
    if nfft_hi < nfft_lo {
        return Err(Error::param("nfft_hi must be >= nfft_lo"));
    }
    let (hi, lo) = (model.cost(nfft_hi), model.cost(nfft_lo));
    // N=1 under N·log N costs nothing at either size
    let reduction_pct = if hi > 0.0 {
        100.0 * (1.0 - lo / hi)
    } else {
        0.0
    };
    Ok(CostReport {
        nfft_hi,
        nfft_lo,
        model,
        reduction_pct,
        span_ratio: None,
        wall_clock_hi: None,
        wall_clock_lo: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_reduction() {
        let r = cost_report(8192, 32, CostModel::Linear).unwrap();
        assert_eq!(r.reduction_pct, 99.609375);
        assert_eq!(r.reduction_pct_2dp(), 99.61);
    }

    #[test]
    fn nlogn_reduction() {
        let r = cost_report(8192, 32, CostModel::NLogN).unwrap();
        let want = 100.0 * (1.0 - (32.0 * 5.0) / (8192.0 * 13.0));
        assert!((r.reduction_pct - want).abs() < 1e-12);
        assert_eq!(r.reduction_pct_2dp(), 99.85);
    }

    #[test]
    fn identical_sizes() {
        for m in [CostModel::Linear, CostModel::NLogN] {
            for n in [1, 32, 8192] {
                assert_eq!(cost_report(n, n, m).unwrap().reduction_pct, 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(cost_report(8000, 32, CostModel::Linear).is_err());
        assert!(cost_report(32, 8192, CostModel::Linear).is_err());
    }

    #[test]
    fn span_ratio_is_eight() {
        let r = cost_report(8192, 32, CostModel::Linear)
            .unwrap()
            .with_spans(8192, 1024, 200_000.0);
        assert!((r.span_ratio.unwrap() - 8.0).abs() < 1e-12);
    }
}
