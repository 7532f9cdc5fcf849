//! Morse-wavelet scalogram of a two-tone signal and its ridge frequencies.
//!
//! ```bash
//! cargo run --release -p gaitframe --example cwt_scalogram -- [out.png]
//! ```

use std::f64::consts::PI;

use gaitframe::encoders::{cwt_scalogram, render_image, CwtConfig, Encoding};

fn main() -> gaitframe::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/example-data/cwt.png".into());
    let fs = 1000.0;
    // 2 Hz for the first second, 8 Hz for the second.
    let x: Vec<f64> = (0..2000)
        .map(|i| {
            let t = i as f64 / fs;
            let f = if t < 1.0 { 2.0 } else { 8.0 };
            (2.0 * PI * f * t).sin()
        })
        .collect();
    let cfg = CwtConfig::default();
    let m = cwt_scalogram(&x, fs, &cfg)?;
    let freqs = cfg.frequencies();
    println!(
        "gamma={} beta={} {} voices/octave, {} scales, peak radian frequency {:.4}",
        cfg.gamma,
        cfg.beta,
        cfg.voices_per_octave,
        m.rows,
        cfg.peak_frequency()
    );
    for t in [0.5, 1.5] {
        let col = (t * fs) as usize;
        println!("t = {t} s: ridge at {:.2} Hz", freqs[m.argmax_in_col(col)]);
    }
    std::fs::create_dir_all(std::path::Path::new(&out).parent().unwrap()).ok();
    render_image(&m, Encoding::Cwt, "two-tone")?.save_png(&out)?;
    println!("wrote {out}");
    Ok(())
}
