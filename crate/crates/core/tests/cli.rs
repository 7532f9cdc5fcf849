use std::path::Path;

use gaitframe::cli::run_with;
use gaitframe::config::ConfigRecord;
use gaitframe::dataset::{read_json, DatasetManifest};
use gaitframe::pipeline::StridesReport;
use gaitframe::synth::GroundTruth;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(std::iter::once("gaitframe").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_encode_build_ms_gives_eight_items() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    let data = tmp.path().join("data");
    let out = ok(&["synth", "--profile", "nonrobust", "--subjects", "1", "--strides", "10", "--seed", "4", "--out", s(&corpus)]);
    assert!(out.contains("nonrobust_000"));
    let truth: GroundTruth = read_json(&corpus.join("nonrobust_000/truth.json")).unwrap();
    assert_eq!(truth.right_hs_s.len(), 11);

    ok(&["encode", "--input", s(&corpus), "--encoding", "gasf", "--out", s(&data)]);
    let out = ok(&["build-dataset", "--input", s(&corpus), "--encoding", "gasf", "--mode", "ms", "--out", s(&data)]);
    assert!(out.contains("items=8"), "{out}");
    let m: DatasetManifest = read_json(&data.join("manifest.json")).unwrap();
    assert_eq!(m.items.len(), 8);
    m.validate().unwrap();
    m.verify_tensors(&data).unwrap();
    let rec: ConfigRecord = read_json(&data.join("config.json")).unwrap();
    assert_eq!(rec.fingerprint, m.config_fingerprint);
}

#[test]
fn segment_writes_strides_json() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["synth", "--profile", "robust", "--subjects", "2", "--strides", "6", "--out", s(tmp.path())]);
    let out = ok(&["segment", "--input", s(tmp.path())]);
    assert_eq!(out.lines().count(), 2);
    let r: StridesReport = read_json(&tmp.path().join("robust_001/strides.json")).unwrap();
    assert_eq!(r.strides.len(), 6);
    assert_eq!(r.triple_count, 4);
    assert_eq!(r.hs_right.len(), 7);
    assert_eq!(r.config_fingerprint.len(), 64);
    assert!(r.strides.iter().all(|st| st.duration_s > 0.9 && st.duration_s < 1.2));
}

#[test]
fn segment_params_file_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let subj = tmp.path().join("robust_000");
    ok(&["synth", "--profile", "robust", "--subjects", "1", "--strides", "5", "--out", s(tmp.path())]);
    let params = tmp.path().join("params.json");
    // Every ~1.05 s stride is longer than this maximum.
    std::fs::write(&params, r#"{"min_stride_s": 0.4, "max_stride_s": 0.9}"#).unwrap();
    let out_dir = tmp.path().join("seg");
    ok(&["segment", "--input", s(&subj), "--params", s(&params), "--out", s(&out_dir)]);
    let r: StridesReport = read_json(&out_dir.join("robust_000/strides.json")).unwrap();
    assert_eq!(r.hs_right.len(), 6);
    assert!(r.strides.is_empty());
    assert!(out_dir.join("config.json").is_file());
}

#[test]
fn inspect_renders_png() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["synth", "--profile", "robust", "--subjects", "1", "--strides", "4", "--out", s(tmp.path())]);
    let png = tmp.path().join("x.png");
    let subj = tmp.path().join("robust_000");
    let out = ok(&["inspect", "--input", s(&subj), "--stride", "0", "--channel", "pelvis_ax", "--encoding", "stft", "--out", s(&png)]);
    assert!(out.contains("strides=4"), "{out}");
    let img = image::open(&png).unwrap();
    assert_eq!((img.width(), img.height()), (224, 224));
}

#[test]
fn ingest_and_preprocess_report() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["synth", "--profile", "robust", "--subjects", "1", "--strides", "3", "--out", s(tmp.path())]);
    let subj = tmp.path().join("robust_000");
    let out = ok(&["ingest", "--input", s(&subj)]);
    assert!(out.contains("label=robust") && out.contains("fs=100.000"), "{out}");
    let out = ok(&["preprocess", "--input", s(&subj), "--target-rate", "500"]);
    assert!(out.contains("fs=500"), "{out}");
}

#[test]
fn invalid_encoding_prints_usage() {
    let (code, _, err) = run(&["build-dataset", "--input", ".", "--encoding", "wavelet", "--out", "x"]);
    assert_eq!(code, 2);
    assert!(err.contains("invalid value 'wavelet'"), "{err}");
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn unknown_subcommand_fails() {
    let (code, _, err) = run(&["train"]);
    assert_ne!(code, 0);
    assert!(!err.is_empty());
}

#[test]
fn runtime_errors_are_one_machine_readable_line() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, err) = run(&["ingest", "--input", s(&tmp.path().join("nope"))]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: kind=missing_file msg="), "{err}");
}

#[test]
fn bad_config_and_flags_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"preprocess": {"band_high": 12}}"#).unwrap();
    let (code, _, err) = run(&["--config", s(&cfg), "segment", "--input", s(tmp.path())]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: kind=invalid_config"), "{err}");

    let (code, _, err) = run(&["preprocess", "--input", s(tmp.path()), "--band-low", "20"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: kind=invalid_config"), "{err}");

    let (code, _, err) = run(&["--threads", "0", "synth", "--profile", "robust", "--out", s(tmp.path())]);
    assert_eq!(code, 1);
    assert!(err.contains("--threads"), "{err}");
}

#[test]
fn config_file_then_flags() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["synth", "--profile", "robust", "--subjects", "1", "--strides", "3", "--out", s(tmp.path())]);
    let subj = tmp.path().join("robust_000");
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"preprocess": {"target_rate_hz": 400}}"#).unwrap();
    let out = ok(&["--config", s(&cfg), "preprocess", "--input", s(&subj)]);
    assert!(out.contains("fs=400"), "{out}");
    let out = ok(&["--config", s(&cfg), "preprocess", "--input", s(&subj), "--target-rate", "250"]);
    assert!(out.contains("fs=250"), "{out}");
}

#[test]
fn threads_env_fallback() {
    use clap::Parser;
    // Only this test touches the variable.
    std::env::set_var("GAITFRAME_THREADS", "3");
    let cli = gaitframe::cli::Cli::try_parse_from(["gaitframe", "synth", "--profile", "robust", "--out", "x"]).unwrap();
    assert_eq!(cli.threads, Some(3));
    let cli =
        gaitframe::cli::Cli::try_parse_from(["gaitframe", "--threads", "2", "synth", "--profile", "robust", "--out", "x"])
            .unwrap();
    assert_eq!(cli.threads, Some(2));
    std::env::remove_var("GAITFRAME_THREADS");
}
