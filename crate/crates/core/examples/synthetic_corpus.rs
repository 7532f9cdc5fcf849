//! Writes a small labelled synthetic corpus in the on-disk CSV layout,
//! with `truth.json` heel-strike times per subject.
//!
//! ```bash
//! cargo run --release -p gaitframe --example synthetic_corpus -- [out_dir]
//! ```

use std::path::PathBuf;

use gaitframe::synth::{generate_corpus, write_subject};

fn main() -> gaitframe::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("target/example-data/corpus"), PathBuf::from);
    for s in generate_corpus(3, 3, 12, 42)? {
        let dir = out.join(&s.recording.subject_id);
        write_subject(&s, &dir)?;
        println!(
            "{:<14} {:<10} {:>5} samples  {:>2} right HS  first at {:.3} s",
            s.recording.subject_id,
            s.recording.label().as_str(),
            s.recording.len(),
            s.truth.right_hs_s.len(),
            s.truth.right_hs_s[0]
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}
