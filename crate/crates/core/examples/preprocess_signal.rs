//! Band-pass, cubic-spline upsampling and normalization of one signal,
//! with the filter's response at a few frequencies.
//!
//! ```bash
//! cargo run --release -p gaitframe --example preprocess_signal
//! ```

use std::f64::consts::PI;

use gaitframe::preprocess::{bandpass, normalize, resample_cubic, PreprocessConfig};

fn main() -> gaitframe::Result<()> {
    let fs = 100.0;
    let cfg = PreprocessConfig::default();
    let filter = cfg.design(fs)?;
    for f in [0.01, 0.1, 1.0, 5.0, 15.0, 30.0, 49.0] {
        println!("gain at {f:>5} Hz: {:>8.2} dB", 20.0 * filter.magnitude(f, fs).log10());
    }

    // 1.5 Hz gait-like tone + drift + 40 Hz interference.
    let x: Vec<f64> = (0..1000)
        .map(|i| {
            let t = i as f64 / fs;
            (2.0 * PI * 1.5 * t).sin() + 0.5 * t + 0.3 * (2.0 * PI * 40.0 * t).sin()
        })
        .collect();
    let y = normalize(&resample_cubic(&bandpass(&x, fs, &cfg)?, fs, cfg.target_rate_hz)?);
    println!("{} samples at {fs} Hz -> {} samples at {} Hz", x.len(), y.len(), cfg.target_rate_hz);
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    println!("normalized range [{lo}, {hi}]");
    Ok(())
}
