//! Continuous wavelet transform with the generalized Morse wavelet,
//! evaluated in the frequency domain.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CwtConfig {
    pub gamma: f64,
    pub beta: f64,
    pub voices_per_octave: usize,
    pub min_freq_hz: f64,
    pub max_freq_hz: f64,
}

impl Default for CwtConfig {
    fn default() -> Self {
        CwtConfig {
            gamma: 3.0,
            beta: 20.0,
            voices_per_octave: 20,
            min_freq_hz: 0.5,
            max_freq_hz: 15.0,
        }
    }
}

impl CwtConfig {
    pub fn validate(&self, fs: f64) -> Result<()> {
        let ok = self.gamma > 0.0
            && self.beta > 0.0
            && self.voices_per_octave >= 1
            && self.min_freq_hz > 0.0
            && self.min_freq_hz < self.max_freq_hz
            && self.max_freq_hz < fs / 2.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid cwt config {self:?} at fs {fs}")))
        }
    }

    /// Peak angular frequency of the mother wavelet, `(beta/gamma)^(1/gamma)`.
    pub fn peak_frequency(&self) -> f64 {
        (self.beta / self.gamma).powf(1.0 / self.gamma)
    }

    /// Centre frequency (Hz) of each scale row: `max_freq_hz * 2^(-j/voices)`
    /// down to `min_freq_hz`. Row 0 is the smallest scale.
    pub fn frequencies(&self) -> Vec<f64> {
        let v = self.voices_per_octave as f64;
        let octaves = (self.max_freq_hz / self.min_freq_hz).log2();
        let count = (octaves * v + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|j| self.max_freq_hz * (-(j as f64) / v).exp2())
            .collect()
    }

    /// Scales in seconds matching [`CwtConfig::frequencies`].
    pub fn scales(&self) -> Vec<f64> {
        let wp = self.peak_frequency();
        self.frequencies().iter().map(|f| wp / (2.0 * PI * f)).collect()
    }

    /// Analytic Morse wavelet in the frequency domain, normalised to peak value 2.
    pub fn morse(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        let (b, g) = (self.beta, self.gamma);
        let log_norm = std::f64::consts::LN_2 + (b / g) * (1.0 + g.ln() - b.ln());
        (log_norm + b * omega.ln() - omega.powf(g)).exp()
    }
}

/// `|C(a, b)|²` on the configured scale grid; rows = scales (ascending),
/// columns = time samples. Uses `C(a,b) = sqrt(a) * IFFT(X(w) * psi(a w))`,
/// i.e. the `1/sqrt(a)` time-domain normalisation, with periodic boundary.
pub fn cwt_scalogram(x: &[f64], fs: f64, cfg: &CwtConfig) -> Result<Matrix> {
    cfg.validate(fs)?;
    let n = x.len();
    if n == 0 {
        return Err(Error::SignalTooShort { needed: 0, got: 0 });
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let mut spectrum: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut spectrum);

    // Angular frequency of each bin; only positive frequencies carry the wavelet.
    let omega: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 || 2 * k > n {
                0.0
            } else {
                2.0 * PI * k as f64 * fs / n as f64
            }
        })
        .collect();

    let scales = cfg.scales();
    let mut out = Matrix::zeros(scales.len(), n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); inv.get_inplace_scratch_len()];
    for (row, &a) in scales.iter().enumerate() {
        for ((b, s), &w) in buf.iter_mut().zip(&spectrum).zip(&omega) {
            *b = s * cfg.morse(a * w);
        }
        inv.process_with_scratch(&mut buf, &mut scratch);
        let scale = a.sqrt() / n as f64;
        for (col, c) in buf.iter().enumerate() {
            out.set(row, col, (c * scale).norm_sqr());
        }
    }
    Ok(out)
}
