//! Full pipeline: synthetic corpus on disk, then a GASF single-stride and
//! multi-stride dataset with 5 stratified folds.
//!
//! ```bash
//! cargo run --release -p gaitframe --example build_dataset -- [work_dir]
//! ```

use std::path::PathBuf;

use gaitframe::dataset::Mode;
use gaitframe::encoders::Encoding;
use gaitframe::pipeline::build_dataset;
use gaitframe::synth::{generate_corpus, write_subject};
use gaitframe::PipelineConfig;

fn main() -> gaitframe::Result<()> {
    let work = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("target/example-data/dataset"), PathBuf::from);
    let corpus = work.join("corpus");
    let out = work.join("gasf");
    for s in generate_corpus(3, 3, 8, 5)? {
        write_subject(&s, corpus.join(&s.recording.subject_id))?;
    }

    let cfg = PipelineConfig::default();
    for (mode, name) in [(Mode::SingleStride, "manifest_ss.json"), (Mode::MultiStride, "manifest_ms.json")] {
        let m = build_dataset(&corpus, Encoding::Gasf, mode, &cfg, &out, name)?;
        m.validate()?;
        println!(
            "{name}: {} items (robust {}, non-robust {}), {} strides, {} images",
            m.items.len(),
            m.class_counts.robust,
            m.class_counts.non_robust,
            m.stride_count,
            m.image_count
        );
        let f = &m.folds[0];
        println!("  fold 0: {} train / {} test", f.train.len(), f.test.len());
    }
    println!("tensors and manifests under {}", out.display());
    Ok(())
}
