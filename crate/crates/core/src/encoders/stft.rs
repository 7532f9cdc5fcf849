//! Gaussian-window short-time Fourier transform power spectrogram.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StftConfig {
    pub window_len_s: f64,
    /// Frame hop; this is the time resolution of the spectrogram.
    pub hop_s: f64,
    /// Zero-padded FFT length.
    pub fft_len: usize,
    pub max_freq_hz: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        StftConfig {
            window_len_s: 0.2,
            hop_s: 0.1,
            fft_len: 4096,
            max_freq_hz: 6.0,
        }
    }
}

impl StftConfig {
    pub fn window_samples(&self, fs: f64) -> usize {
        (self.window_len_s * fs).round() as usize
    }

    pub fn hop_samples(&self, fs: f64) -> usize {
        ((self.hop_s * fs).round() as usize).max(1)
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        let l = self.window_samples(fs);
        if !(self.hop_s > 0.0 && self.hop_s <= self.window_len_s) {
            return Err(Error::InvalidConfig(format!(
                "stft hop {} s must be in (0, window {} s]",
                self.hop_s, self.window_len_s
            )));
        }
        if !(self.max_freq_hz > 0.0 && self.max_freq_hz < fs / 2.0) {
            return Err(Error::InvalidConfig(format!(
                "stft max_freq_hz {} must lie in (0, {})",
                self.max_freq_hz,
                fs / 2.0
            )));
        }
        if l < 2 || self.fft_len < l {
            return Err(Error::InvalidConfig(format!(
                "stft window of {l} samples needs 2 <= window <= fft_len ({})",
                self.fft_len
            )));
        }
        Ok(())
    }

    /// Frequency of each output row.
    pub fn row_frequencies(&self, fs: f64) -> Vec<f64> {
        let bin = fs / self.fft_len as f64;
        let k_max = (self.max_freq_hz / bin + 1e-9).floor() as usize;
        (0..=k_max).map(|k| k as f64 * bin).collect()
    }
}

/// Gaussian window of `len` samples with sigma `len / 6`, centred.
pub fn gaussian_window(len: usize) -> Vec<f64> {
    let sigma = len as f64 / 6.0;
    let centre = (len as f64 - 1.0) / 2.0;
    (0..len)
        .map(|n| {
            let z = (n as f64 - centre) / sigma;
            (-0.5 * z * z).exp()
        })
        .collect()
}

/// Squared STFT magnitude, rows = frequencies `0..=max_freq_hz`
/// (ascending), columns = frames at `hop_s` spacing. Frames lie fully
/// inside the signal.
pub fn stft_spectrogram(x: &[f64], fs: f64, cfg: &StftConfig) -> Result<Matrix> {
    cfg.validate(fs)?;
    let l = cfg.window_samples(fs);
    if x.len() < l {
        return Err(Error::SignalTooShort {
            needed: l - 1,
            got: x.len(),
        });
    }
    let hop = cfg.hop_samples(fs);
    let n_fft = cfg.fft_len;
    let frames = (x.len() - l) / hop + 1;
    let rows = cfg.row_frequencies(fs).len();
    let window = gaussian_window(l);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_fft);

    let mut out = Matrix::zeros(rows, frames);
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for m in 0..frames {
        let frame = &x[m * hop..m * hop + l];
        for (b, (v, w)) in buf.iter_mut().zip(frame.iter().zip(&window)) {
            *b = Complex64::new(v * w, 0.0);
        }
        buf[l..].fill(Complex64::new(0.0, 0.0));
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (k, c) in buf.iter().take(rows).enumerate() {
            out.set(k, m, c.norm_sqr());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_signal() {
        let m = stft_spectrogram(&vec![0.0; 1100], 1000.0, &StftConfig::default()).unwrap();
        assert_eq!((m.rows, m.cols), (25, 10));
        assert!(m.data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn scaling_quadruples_power() {
        let x: Vec<f64> = (0..1500).map(|i| ((i * 31 % 97) as f64 / 50.0).sin()).collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let cfg = StftConfig::default();
        let a = stft_spectrogram(&x, 1000.0, &cfg).unwrap();
        let b = stft_spectrogram(&x2, 1000.0, &cfg).unwrap();
        for (p, q) in a.data.iter().zip(&b.data) {
            assert!((q - 4.0 * p).abs() <= 1e-9 * q.abs().max(1e-300));
        }
    }

    #[test]
    fn resolving_window_finds_tone() {
        // 3 s Gaussian window: sigma_f ~ 0.32 Hz, enough to separate +-f0.
        let cfg = StftConfig {
            window_len_s: 3.0,
            hop_s: 0.5,
            fft_len: 8192,
            max_freq_hz: 6.0,
        };
        let fs = 1000.0;
        for f0 in [1.0, 2.0, 5.0] {
            let x: Vec<f64> = (0..6000).map(|i| (2.0 * PI * f0 * i as f64 / fs).sin()).collect();
            let m = stft_spectrogram(&x, fs, &cfg).unwrap();
            let freqs = cfg.row_frequencies(fs);
            let bin = fs / cfg.fft_len as f64;
            for c in 0..m.cols {
                let r = m.argmax_in_col(c);
                assert!((freqs[r] - f0).abs() <= bin, "{f0} Hz: got {}", freqs[r]);
            }
        }
    }

    #[test]
    fn too_short_and_bad_config() {
        assert!(matches!(
            stft_spectrogram(&[0.0; 150], 1000.0, &StftConfig::default()),
            Err(Error::SignalTooShort { .. })
        ));
        let bad = StftConfig {
            hop_s: 0.5,
            ..Default::default()
        };
        assert!(bad.validate(1000.0).is_err());
        let bad = StftConfig {
            max_freq_hz: 600.0,
            ..Default::default()
        };
        assert!(bad.validate(1000.0).is_err());
    }
}
