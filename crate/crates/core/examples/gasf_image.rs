//! Gramian angular summation field of a normalized stride signal.
//!
//! ```bash
//! cargo run --release -p gaitframe --example gasf_image -- [out.png]
//! ```

use std::f64::consts::PI;

use gaitframe::encoders::{gasf, paa, render_image, Encoding, IMAGE_SIZE};

fn main() -> gaitframe::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/example-data/gasf.png".into());
    let x: Vec<f64> = (0..1100).map(|i| (2.0 * PI * i as f64 / 1100.0).sin()).collect();
    let reduced = paa(&x, IMAGE_SIZE)?;
    let g = gasf(&reduced);
    println!("{} samples -> PAA {} -> GASF {}x{}", x.len(), reduced.len(), g.rows, g.cols);
    for i in [0, 56, 112] {
        println!("diag[{i}] = {:.6}  (2x^2 - 1 = {:.6})", g.get(i, i), 2.0 * reduced[i].powi(2) - 1.0);
    }
    std::fs::create_dir_all(std::path::Path::new(&out).parent().unwrap()).ok();
    render_image(&g, Encoding::Gasf, "sine")?.save_png(&out)?;
    println!("wrote {out}");
    Ok(())
}
