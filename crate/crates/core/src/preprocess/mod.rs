//! Band-pass filtering, cubic-spline upsampling and min-max normalization.

mod butterworth;
mod spline;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use butterworth::{butter_bandpass, Biquad, SosFilter};
pub use spline::{resample_cubic, resampled_len, NotAKnotSpline};

use crate::error::{Error, Result};
use crate::ingest::ChannelSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub target_rate_hz: f64,
    pub filter_order: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            band_low_hz: 0.1,
            band_high_hz: 15.0,
            target_rate_hz: 1000.0,
            filter_order: 4,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.band_low_hz > 0.0
            && self.band_low_hz < self.band_high_hz
            && self.band_high_hz < self.target_rate_hz / 2.0
            && self.target_rate_hz.is_finite();
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "need 0 < band_low_hz ({}) < band_high_hz ({}) < target_rate_hz/2 ({})",
                self.band_low_hz,
                self.band_high_hz,
                self.target_rate_hz / 2.0
            )));
        }
        if self.filter_order == 0 {
            return Err(Error::InvalidConfig("filter_order must be >= 1".into()));
        }
        Ok(())
    }

    pub fn design(&self, fs: f64) -> Result<SosFilter> {
        if fs.is_nan() || fs <= 2.0 * self.band_high_hz {
            return Err(Error::InvalidConfig(format!(
                "sample rate {fs} Hz cannot carry a {} Hz band edge",
                self.band_high_hz
            )));
        }
        butter_bandpass(self.filter_order, self.band_low_hz, self.band_high_hz, fs)
    }
}

/// Zero-phase Butterworth band-pass of `signal` sampled at `fs`.
pub fn bandpass(signal: &[f64], fs: f64, cfg: &PreprocessConfig) -> Result<Vec<f64>> {
    cfg.design(fs)?.filtfilt(signal)
}

/// Affine map sending min to -1 and max to +1. Constant input maps to zeros.
pub fn normalize(signal: &[f64]) -> Vec<f64> {
    let (lo, hi) = signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range.is_finite() && range > 0.0) {
        return vec![0.0; signal.len()];
    }
    signal.iter().map(|&v| 2.0 * (v - lo) / range - 1.0).collect()
}

fn process_series(x: &[f64], fs: f64, filter: &SosFilter, cfg: &PreprocessConfig) -> Result<Vec<f64>> {
    let filtered = filter.filtfilt(x)?;
    let upsampled = resample_cubic(&filtered, fs, cfg.target_rate_hz)?;
    Ok(normalize(&upsampled))
}

/// Band-pass, then upsample, then normalize every channel (and both raw foot
/// gy series), each channel independently.
pub fn preprocess_all(cs: &ChannelSet, cfg: &PreprocessConfig) -> Result<ChannelSet> {
    cfg.validate()?;
    cs.validate()?;
    let fs = cs.sample_rate_hz;
    let filter = cfg.design(fs)?;

    let inputs: Vec<&[f64]> = cs
        .channels
        .iter()
        .map(Vec::as_slice)
        .chain([cs.right_gy.as_slice(), cs.left_gy.as_slice()])
        .collect();
    let mut outputs = inputs
        .par_iter()
        .map(|x| process_series(x, fs, &filter, cfg))
        .collect::<Result<Vec<_>>>()?;

    let left_gy = outputs.pop().expect("left gy");
    let right_gy = outputs.pop().expect("right gy");
    Ok(ChannelSet {
        subject_id: cs.subject_id.clone(),
        sample_rate_hz: cfg.target_rate_hz,
        label: cs.label,
        channels: outputs,
        right_gy,
        left_gy,
    })
}
