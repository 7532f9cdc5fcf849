//! Round-trips a recording through the CSV layout and prints the 14
//! derived feature channels.
//!
//! ```bash
//! cargo run --release -p gaitframe --example ingest_channels
//! ```

use gaitframe::ingest::{derive_channels, parse_recording, write_recording, CHANNEL_NAMES};
use gaitframe::synth::{generate_subject, GaitProfile};

fn main() -> gaitframe::Result<()> {
    let subject = generate_subject(&GaitProfile::non_robust(), 8, 3, "demo")?;
    let dir = std::env::temp_dir().join("gaitframe-ingest-demo");
    write_recording(&subject.recording, &dir)?;

    let rec = parse_recording(&dir)?;
    println!(
        "{}: frail_score={} label={} fs={:.1} Hz, {} samples",
        rec.subject_id,
        rec.frail_score,
        rec.label().as_str(),
        rec.sample_rate_hz,
        rec.len()
    );
    let cs = derive_channels(&rec)?;
    for (name, ch) in CHANNEL_NAMES.iter().zip(&cs.channels) {
        let (lo, hi) = ch.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        println!("  {name:<10} min {lo:>8.3}  max {hi:>8.3}");
    }
    Ok(())
}
