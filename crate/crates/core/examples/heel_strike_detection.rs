//! Detects heel strikes on a synthetic corpus and scores them against the
//! generator's ground truth at a ±30 ms tolerance.
//!
//! ```bash
//! cargo run --release -p gaitframe --example heel_strike_detection -- [subjects_per_class] [strides]
//! ```

use gaitframe::pipeline::segment_recording;
use gaitframe::synth::generate_corpus;
use gaitframe::PipelineConfig;

const TOLERANCE_S: f64 = 0.030;

/// Greedy one-to-one matching within tolerance: (true positives, detections, truths).
fn score(detected_s: &[f64], truth_s: &[f64]) -> (usize, usize, usize) {
    let mut used = vec![false; truth_s.len()];
    let mut tp = 0;
    for &d in detected_s {
        if let Some(j) = (0..truth_s.len()).find(|&j| !used[j] && (truth_s[j] - d).abs() <= TOLERANCE_S) {
            used[j] = true;
            tp += 1;
        }
    }
    (tp, detected_s.len(), truth_s.len())
}

fn main() -> gaitframe::Result<()> {
    let mut args = std::env::args().skip(1);
    let per_class: usize = args.next().map_or(3, |a| a.parse().expect("subjects per class"));
    let strides: usize = args.next().map_or(20, |a| a.parse().expect("strides"));

    let cfg = PipelineConfig::default();
    let (mut tp, mut det, mut tru) = (0, 0, 0);
    for s in generate_corpus(per_class, per_class, strides, 7)? {
        let seg = segment_recording(&s.recording, &cfg)?;
        let fs = seg.channels.sample_rate_hz;
        let to_s = |v: &[usize]| v.iter().map(|&i| i as f64 / fs).collect::<Vec<_>>();
        let r = score(&to_s(&seg.hs_right), &s.truth.right_hs_s);
        let l = score(&to_s(&seg.hs_left), &s.truth.left_hs_s);
        println!(
            "{:<14} right {:>3}/{:<3} left {:>3}/{:<3} strides {:>3}",
            s.recording.subject_id, r.0, r.2, l.0, l.2, seg.strides.len()
        );
        tp += r.0 + l.0;
        det += r.1 + l.1;
        tru += r.2 + l.2;
    }
    println!(
        "precision {:.4}  recall {:.4}  (±{} ms)",
        tp as f64 / det as f64,
        tp as f64 / tru as f64,
        TOLERANCE_S * 1e3
    );
    Ok(())
}
