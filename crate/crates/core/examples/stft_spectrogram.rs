//! STFT spectrogram of a stride-like chirp, saved as a colormapped PNG.
//!
//! ```bash
//! cargo run --release -p gaitframe --example stft_spectrogram -- [out.png]
//! ```

use std::f64::consts::PI;

use gaitframe::encoders::{render_image, stft_spectrogram, Encoding, StftConfig};

fn main() -> gaitframe::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/example-data/stft.png".into());
    let fs = 1000.0;
    // 1.2 s linear sweep from 3 to 12 Hz.
    let x: Vec<f64> = (0..1200)
        .map(|i| {
            let t = i as f64 / fs;
            (2.0 * PI * (3.0 * t + 4.5 * t * t / 1.2)).sin()
        })
        .collect();
    let cfg = StftConfig::default();
    let m = stft_spectrogram(&x, fs, &cfg)?;
    println!(
        "window {} samples, hop {}, {} frequency rows x {} frames",
        cfg.window_samples(fs),
        cfg.hop_samples(fs),
        m.rows,
        m.cols
    );
    let freqs = cfg.row_frequencies(fs);
    for col in [0, m.cols / 2, m.cols - 1] {
        println!("frame {col:>2}: peak at {:.2} Hz", freqs[m.argmax_in_col(col)]);
    }
    std::fs::create_dir_all(std::path::Path::new(&out).parent().unwrap()).ok();
    render_image(&m, Encoding::Stft, "chirp")?.save_png(&out)?;
    println!("wrote {out}");
    Ok(())
}
