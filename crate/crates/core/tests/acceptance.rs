//! Acceptance criteria 1-7. Runs as a plain binary so every criterion
//! prints its own PASS/FAIL line; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaitframe::cli;
use gaitframe::dataset::{read_json, read_tensor, write_tensor, DatasetManifest, EncodedIndex, Tensor3};
use gaitframe::encoders::{cwt_scalogram, gasf, stft_spectrogram, CwtConfig, Encoding, StftConfig};
use gaitframe::ingest::FrailtyLabel;
use gaitframe::pipeline::segment_recording;
use gaitframe::preprocess::{resample_cubic, PreprocessConfig};
use gaitframe::segmentation::{make_triples, Stride};
use gaitframe::synth::{generate_corpus, generate_subject, write_subject, GaitProfile};
use gaitframe::PipelineConfig;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------------------------------------------------------------- 1: GASF

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut identity_err, mut sym_err, mut diag_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let x: Vec<f64> = (0..224).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let g = gasf(&x);
        for i in 0..224 {
            let si = (1.0 - x[i] * x[i]).sqrt();
            for j in 0..224 {
                let identity = x[i] * x[j] - si * (1.0 - x[j] * x[j]).sqrt();
                identity_err = identity_err.max((g.get(i, j) - identity).abs());
                sym_err = sym_err.max((g.get(i, j) - g.get(j, i)).abs());
            }
            diag_err = diag_err.max((g.get(i, i) - (2.0 * x[i] * x[i] - 1.0)).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        identity_err <= 1e-12 && sym_err <= 1e-12 && diag_err <= 1e-12 && elapsed < Duration::from_secs(10),
        format!(
            "max |cos-sum - identity| {identity_err:.2e}, asymmetry {sym_err:.2e}, diagonal {diag_err:.2e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 2: STFT

/// Direct summation of `|sum_n x[n] w(n - m*hop) e^{-j 2 pi k n / N}|^2`
/// over absolute sample times.
fn stft_oracle(x: &[f64], fs: f64, cfg: &StftConfig) -> Vec<Vec<f64>> {
    let l = (cfg.window_len_s * fs).round() as usize;
    let hop = (cfg.hop_s * fs).round() as usize;
    let sigma = l as f64 / 6.0;
    let centre = (l as f64 - 1.0) / 2.0;
    let n_fft = cfg.fft_len as f64;
    let k_max = (cfg.max_freq_hz * n_fft / fs + 1e-9).floor() as usize;
    let frames = (x.len() - l) / hop + 1;
    (0..frames)
        .map(|m| {
            (0..=k_max)
                .map(|k| {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (t, &v) in x[m * hop..m * hop + l].iter().enumerate() {
                        let n = m * hop + t;
                        let w = (-0.5 * (t as f64 - centre).powi(2) / (sigma * sigma)).exp();
                        let ph = -2.0 * PI * k as f64 * n as f64 / n_fft;
                        re += v * w * ph.cos();
                        im += v * w * ph.sin();
                    }
                    re * re + im * im
                })
                .collect()
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let fs = 1000.0;
    let cfg = StftConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let len = rng.random_range(200..=2048);
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let got = stft_spectrogram(&x, fs, &cfg).expect("stft");
        let want = stft_oracle(&x, fs, &cfg);
        let (mut num, mut den) = (0.0, 0.0);
        for (m, col) in want.iter().enumerate() {
            for (k, &o) in col.iter().enumerate() {
                num += (got.get(k, m) - o).powi(2);
                den += o * o;
            }
        }
        worst = worst.max((num / den).sqrt());
    }

    let bin = fs / cfg.fft_len as f64;
    let freqs = cfg.row_frequencies(fs);
    let mut tone_notes = Vec::new();
    let mut tones_ok = true;
    for tone in [1.0, 2.0, 5.0] {
        let x: Vec<f64> = (0..1100).map(|i| (2.0 * PI * tone * i as f64 / fs).sin()).collect();
        let m = stft_spectrogram(&x, fs, &cfg).expect("stft");
        let peaks: Vec<f64> = (0..m.cols).map(|c| freqs[m.argmax_in_col(c)]).collect();
        let bad = peaks.iter().filter(|&&f| (f - tone).abs() > bin + 1e-12).count();
        tones_ok &= bad == 0;
        let (lo, hi) = peaks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &f| (a.min(f), b.max(f)));
        tone_notes.push(format!("{tone} Hz -> argmax {lo:.2}..{hi:.2} Hz ({bad}/{} frames off)", m.cols));
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && tones_ok && elapsed < Duration::from_secs(60),
        format!(
            "oracle rel. Frobenius {worst:.2e}; tones (bin {bin:.3} Hz): {}; {:.2} s",
            tone_notes.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 3: CWT

fn criterion_3() -> Outcome {
    let fs = 1000.0;
    let cfg = CwtConfig::default();
    let omega_peak = (cfg.beta / cfg.gamma).powf(1.0 / cfg.gamma);
    let centre_hz: Vec<f64> = cfg.scales().iter().map(|a| omega_peak / (2.0 * PI * a)).collect();
    let voice = 1.0 / cfg.voices_per_octave as f64;
    let mut worst = 0.0f64;
    for tone in [1.0, 2.0, 5.0, 10.0] {
        let x: Vec<f64> = (0..2000).map(|i| (2.0 * PI * tone * i as f64 / fs).sin()).collect();
        let m = cwt_scalogram(&x, fs, &cfg).expect("cwt");
        for c in 0..m.cols {
            let f = centre_hz[m.argmax_in_col(c)];
            worst = worst.max((f / tone).log2().abs() / voice);
        }
    }
    outcome(
        worst <= 1.0 + 1e-9,
        format!("worst per-column ridge error {worst:.3} voices over 1, 2, 5, 10 Hz"),
    )
}

// ---------------------------------------------------------------- 4: spline

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-5.0..5.0));
        let p = |t: f64| ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
        let fs_in = [50.0, 100.0, 128.0][rng.random_range(0..3)];
        let fs_out = [1000.0, 1024.0, 500.0][rng.random_range(0..3)];
        let n = rng.random_range(4..=200);
        let x: Vec<f64> = (0..n).map(|i| p(i as f64 / fs_in)).collect();
        let y = resample_cubic(&x, fs_in, fs_out).expect("resample");
        for (i, v) in y.iter().enumerate() {
            worst = worst.max((v - p(i as f64 / fs_out)).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max |spline - cubic| {worst:.2e} over 200 random cubics"))
}

// ---------------------------------------------------------------- 5: filter

/// Amplitude at `freq` by least-squares projection over `y[trim..len-trim]`.
fn amplitude(y: &[f64], freq: f64, fs: f64, trim: usize) -> f64 {
    let (mut s, mut c, mut ss, mut cc) = (0.0, 0.0, 0.0, 0.0);
    for (n, v) in y.iter().enumerate().take(y.len() - trim).skip(trim) {
        let ph = 2.0 * PI * freq * n as f64 / fs;
        s += v * ph.sin();
        c += v * ph.cos();
        ss += ph.sin().powi(2);
        cc += ph.cos().powi(2);
    }
    ((s / ss).powi(2) + (c / cc).powi(2)).sqrt()
}

fn criterion_5() -> Outcome {
    let cfg = PreprocessConfig::default();
    let tone = |f: f64, fs: f64, secs: f64| -> Vec<f64> {
        (0..(fs * secs) as usize).map(|n| (2.0 * PI * f * n as f64 / fs).sin()).collect()
    };

    let fs = 100.0;
    let f100 = cfg.design(fs).expect("design");
    let gain_5 = amplitude(&f100.filtfilt(&tone(5.0, fs, 20.0)).unwrap(), 5.0, fs, 200);

    let dc_out = f100.filtfilt(&vec![1.0; 6000]).unwrap();
    let dc_db = 20.0 * dc_out[1000..5000].iter().fold(0.0f64, |a, v| a.max(v.abs())).log10();

    let fs_hi = 1000.0;
    let f1000 = cfg.design(fs_hi).expect("design");
    let out_50 = f1000.filtfilt(&tone(50.0, fs_hi, 10.0)).unwrap();
    let db_50 = 20.0 * amplitude(&out_50, 50.0, fs_hi, 2000).log10();

    // Band-limited multi-tone input; cross-correlate with its output.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let comps: Vec<(f64, f64)> = (0..12)
        .map(|_| (rng.random_range(0.5..10.0), rng.random_range(0.0..2.0 * PI)))
        .collect();
    let x: Vec<f64> = (0..3000)
        .map(|n| comps.iter().map(|(f, p)| (2.0 * PI * f * n as f64 / fs + p).sin()).sum())
        .collect();
    let y = f100.filtfilt(&x).unwrap();
    let xcorr = |lag: i64| -> f64 {
        (0..x.len() as i64)
            .filter_map(|n| {
                let m = n + lag;
                (m >= 0 && m < y.len() as i64).then(|| x[n as usize] * y[m as usize])
            })
            .sum()
    };
    let best_lag = (-50..=50)
        .max_by(|&a, &b| xcorr(a).partial_cmp(&xcorr(b)).unwrap())
        .unwrap();

    outcome(
        (0.95..=1.05).contains(&gain_5) && dc_db < -40.0 && db_50 < -40.0 && best_lag == 0,
        format!("5 Hz gain {gain_5:.4}, DC {dc_db:.1} dB, 50 Hz {db_50:.1} dB, xcorr peak lag {best_lag}"),
    )
}

// ---------------------------------------------------------------- 6: segmentation

const TOLERANCE_S: f64 = 0.030;

/// Greedy one-to-one matching within tolerance, both lists ascending.
fn matches(detected_s: &[f64], truth_s: &[f64]) -> usize {
    let mut used = vec![false; truth_s.len()];
    let mut tp = 0;
    for &d in detected_s {
        if let Some(j) = (0..truth_s.len()).find(|&j| !used[j] && (truth_s[j] - d).abs() <= TOLERANCE_S) {
            used[j] = true;
            tp += 1;
        }
    }
    tp
}

/// Σ max(0, run length - 2) over runs of consecutive indices.
fn expected_triples(strides: &[Stride]) -> usize {
    let mut total = 0;
    let mut run = 0usize;
    let mut prev: Option<usize> = None;
    for s in strides {
        run = match prev {
            Some(p) if s.index == p + 1 => run + 1,
            _ => {
                total += run.saturating_sub(2);
                1
            }
        };
        prev = Some(s.index);
    }
    total + run.saturating_sub(2)
}

fn criterion_6() -> Outcome {
    let cfg = PipelineConfig::default();
    let corpus = generate_corpus(10, 10, 30, 2024).expect("corpus");
    let mut per_foot: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    let mut triples_ok = true;
    for s in &corpus {
        let seg = segment_recording(&s.recording, &cfg).expect("segment");
        let fs = seg.channels.sample_rate_hz;
        for (foot, det, truth) in [
            ("right", &seg.hs_right, &s.truth.right_hs_s),
            ("left", &seg.hs_left, &s.truth.left_hs_s),
        ] {
            let det_s: Vec<f64> = det.iter().map(|&i| i as f64 / fs).collect();
            let e = per_foot.entry(foot).or_default();
            e.0 += matches(&det_s, truth);
            e.1 += det_s.len();
            e.2 += truth.len();
        }
        triples_ok &= make_triples(&seg.strides).len() == expected_triples(&seg.strides);
    }

    let ten = generate_subject(&GaitProfile::robust(), 10, 77, "ten").expect("subject");
    let seg = segment_recording(&ten.recording, &cfg).expect("segment");
    let t = make_triples(&seg.strides);
    let worked = seg.strides.len() == 10
        && t.len() == 8
        && t.first().map(|t| t.stride_indices) == Some([0, 1, 2])
        && t.last().map(|t| t.stride_indices) == Some([7, 8, 9]);

    let mut ok = triples_ok && worked;
    let mut notes = Vec::new();
    for (foot, (tp, det, tru)) in &per_foot {
        let (p, r) = (*tp as f64 / *det as f64, *tp as f64 / *tru as f64);
        ok &= p >= 0.95 && r >= 0.95;
        notes.push(format!("{foot} P {p:.4} R {r:.4}"));
    }
    outcome(
        ok,
        format!(
            "{}; n-2 law {}; 10 strides -> {} triples",
            notes.join(", "),
            if triples_ok { "holds" } else { "violated" },
            t.len()
        ),
    )
}

// ---------------------------------------------------------------- 7: dataset

fn files_under(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(&p, root, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run_with(std::iter::once("gaitframe").chain(args.iter().copied()), &mut out, &mut err);
    if code == 0 {
        Ok(String::from_utf8_lossy(&out).into_owned())
    } else {
        Err(String::from_utf8_lossy(&err).into_owned())
    }
}

fn criterion_7() -> Outcome {
    let tmp = tempfile::tempdir().expect("tempdir");
    let corpus = tmp.path().join("corpus");
    for s in generate_corpus(2, 2, 6, 7).expect("corpus") {
        write_subject(&s, corpus.join(&s.recording.subject_id)).expect("write");
    }
    let corpus_s = corpus.to_str().unwrap();

    let mut shape_ok = true;
    let mut roundtrip_ok = true;
    let mut split_ok = true;
    let mut identical_ok = true;
    let mut notes = Vec::new();
    for enc in Encoding::ALL {
        let mut trees = Vec::new();
        for threads in ["1", "8"] {
            let out = tmp.path().join(format!("{enc}_t{threads}"));
            let out_s = out.to_str().unwrap();
            for (mode, name) in [("ss", "manifest_ss.json"), ("ms", "manifest_ms.json")] {
                let args = [
                    "--threads", threads, "build-dataset", "--input", corpus_s, "--encoding", enc.as_str(), "--mode",
                    mode, "--seed", "11", "--manifest-name", name, "--out", out_s,
                ];
                if let Err(e) = run_cli(&args) {
                    return outcome(false, format!("build-dataset {enc} {mode} failed: {e}"));
                }
            }
            trees.push(files_under(&out));

            if threads == "1" {
                let index: EncodedIndex = read_json(&EncodedIndex::path(&out, enc)).unwrap();
                for r in &index.strides {
                    let path = out.join(&r.tensor_path);
                    let bytes = std::fs::read(&path).unwrap();
                    let t = read_tensor(&path).unwrap();
                    shape_ok &= t.shape() == (224, 224, 42) && bytes.len() == 16 + 224 * 224 * 42 * 4;
                    roundtrip_ok &= t.to_bytes() == bytes;
                }
                for name in ["manifest_ss.json", "manifest_ms.json"] {
                    let m: DatasetManifest = read_json(&out.join(name)).unwrap();
                    split_ok &= m.validate().is_ok() && m.verify_tensors(&out).is_ok() && splits_within_one(&m);
                    notes.push(format!("{enc}/{:?}: {} items", m.mode, m.items.len()));
                }
            }
        }
        identical_ok &= trees[0] == trees[1];
    }

    // Round-trip of arbitrary bit patterns, including NaN payloads and -0.0.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data: Vec<f32> = (0..224 * 224 * 42).map(|_| f32::from_bits(rng.random())).collect();
    let t = Tensor3::new(224, 224, 42, data).unwrap();
    let p = tmp.path().join("random.gft");
    write_tensor(&p, &t).unwrap();
    let back = read_tensor(&p).unwrap();
    roundtrip_ok &= back.data.iter().zip(&t.data).all(|(a, b)| a.to_bits() == b.to_bits());

    outcome(
        shape_ok && roundtrip_ok && split_ok && identical_ok,
        format!(
            "shape {}, round-trip {}, splits {}, threads 1 vs 8 {}; {}",
            if shape_ok { "224x224x42" } else { "WRONG" },
            if roundtrip_ok { "bit-exact" } else { "differs" },
            if split_ok { "within ±1/class" } else { "out of tolerance" },
            if identical_ok { "byte-identical" } else { "differ" },
            notes.join(", ")
        ),
    )
}

/// Every fold's test set holds `test_frac * n_c` items of class `c`, ±1.
fn splits_within_one(m: &DatasetManifest) -> bool {
    let count = |ids: &[usize], label: FrailtyLabel| ids.iter().filter(|&&i| m.items[i].label == label).count();
    let all: Vec<usize> = (0..m.items.len()).collect();
    m.folds.iter().all(|f| {
        [FrailtyLabel::Robust, FrailtyLabel::NonRobust].iter().all(|&label| {
            let n = count(&all, label) as f64;
            (count(&f.test, label) as f64 - m.split.test_frac * n).abs() <= 1.0
        })
    })
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("GASF identity, symmetry and diagonal", criterion_1),
        ("STFT oracle and tone localisation", criterion_2),
        ("CWT ridge localisation", criterion_3),
        ("cubic spline exactness", criterion_4),
        ("band-pass filter contract", criterion_5),
        ("heel-strike detection and triples", criterion_6),
        ("dataset contract", criterion_7),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 7 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
