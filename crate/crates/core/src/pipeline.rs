//! End-to-end helpers: subject directory → strides → encoded corpus →
//! dataset.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::dataset::{
    build_manifest, encode_strides, read_json, write_json, DatasetManifest, EncodedIndex, Mode, StrideRecord,
    MANIFEST_FILE,
};
use crate::encoders::{Encoding, IMAGE_SIZE, STACK_CHANNELS};
use crate::error::{Error, Result};
use crate::ingest::{derive_channels, parse_recording, ChannelSet, FrailtyLabel, ImuRecording, SUBJECT_FILE};
use crate::preprocess::preprocess_all;
use crate::segmentation::{detect_heel_strikes, extract_strides, make_triples, Stride};

pub const CONFIG_FILE: &str = "config.json";
pub const STRIDES_FILE: &str = "strides.json";

/// One subject after preprocessing and segmentation.
#[derive(Debug, Clone)]
pub struct SegmentedSubject {
    /// Preprocessed channels at the target rate.
    pub channels: ChannelSet,
    pub hs_right: Vec<usize>,
    pub hs_left: Vec<usize>,
    pub strides: Vec<Stride>,
}

pub fn segment_channels(raw: &ChannelSet, cfg: &PipelineConfig) -> Result<SegmentedSubject> {
    cfg.heel_strike.validate()?;
    let channels = preprocess_all(raw, &cfg.preprocess)?;
    let fs = channels.sample_rate_hz;
    let hs_right = detect_heel_strikes(&channels.right_gy, fs, &cfg.heel_strike);
    let hs_left = detect_heel_strikes(&channels.left_gy, fs, &cfg.heel_strike);
    let strides = extract_strides(&channels, &hs_right, &hs_left, &cfg.heel_strike);
    Ok(SegmentedSubject {
        channels,
        hs_right,
        hs_left,
        strides,
    })
}

pub fn segment_recording(rec: &ImuRecording, cfg: &PipelineConfig) -> Result<SegmentedSubject> {
    segment_channels(&derive_channels(rec)?, cfg)
}

pub fn segment_dir(dir: impl AsRef<Path>, cfg: &PipelineConfig) -> Result<SegmentedSubject> {
    segment_recording(&parse_recording(dir)?, cfg)
}

/// `root` itself if it is a subject directory, otherwise its subject
/// subdirectories in name order.
pub fn subject_dirs(root: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let root = root.as_ref();
    if root.join(SUBJECT_FILE).is_file() {
        return Ok(vec![root.to_path_buf()]);
    }
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut dirs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.join(SUBJECT_FILE).is_file() {
            dirs.push(path);
        }
    }
    if dirs.is_empty() {
        return Err(Error::MissingFile(root.join(SUBJECT_FILE)));
    }
    dirs.sort();
    Ok(dirs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrideSummary {
    pub index: usize,
    pub start_idx: usize,
    pub end_idx: usize,
    pub duration_s: f64,
    pub left_hs: Vec<usize>,
}

/// Contents of `strides.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StridesReport {
    pub subject_id: String,
    pub label: FrailtyLabel,
    pub sample_rate_hz: f64,
    pub config_fingerprint: String,
    pub hs_right: Vec<usize>,
    pub hs_left: Vec<usize>,
    pub strides: Vec<StrideSummary>,
    pub triple_count: usize,
}

impl SegmentedSubject {
    pub fn report(&self, config_fingerprint: &str) -> StridesReport {
        StridesReport {
            subject_id: self.channels.subject_id.clone(),
            label: self.channels.label,
            sample_rate_hz: self.channels.sample_rate_hz,
            config_fingerprint: config_fingerprint.to_string(),
            hs_right: self.hs_right.clone(),
            hs_left: self.hs_left.clone(),
            strides: self
                .strides
                .iter()
                .map(|s| StrideSummary {
                    index: s.index,
                    start_idx: s.start_idx,
                    end_idx: s.end_idx,
                    duration_s: s.duration_s(),
                    left_hs: s.left_hs.clone(),
                })
                .collect(),
            triple_count: make_triples(&self.strides).len(),
        }
    }
}

fn reusable_index(out: &Path, encoding: Encoding, fingerprint: &str) -> Option<EncodedIndex> {
    let index: EncodedIndex = read_json(&EncodedIndex::path(out, encoding)).ok()?;
    let complete = index.encoding == encoding
        && index.signal_fingerprint == fingerprint
        && index.strides.iter().all(|r| out.join(&r.tensor_path).is_file());
    complete.then_some(index)
}

/// Segments and encodes every subject under `input`, writing tensors and
/// `tensors/<encoding>/index.json` under `out`. An existing index with the
/// same signal fingerprint is reused as is.
pub fn encode_corpus(input: &Path, encoding: Encoding, cfg: &PipelineConfig, out: &Path) -> Result<EncodedIndex> {
    cfg.validate()?;
    let fingerprint = cfg.signal_fingerprint();
    if let Some(index) = reusable_index(out, encoding, &fingerprint) {
        return Ok(index);
    }
    let dirs = subject_dirs(input)?;
    let enc_dir = out.join("tensors").join(encoding.as_str());
    if enc_dir.exists() {
        fs::remove_dir_all(&enc_dir).map_err(|e| Error::io(&enc_dir, e))?;
    }

    let per_subject: Vec<Vec<StrideRecord>> = dirs
        .par_iter()
        .map(|dir| {
            let seg = segment_dir(dir, cfg)?;
            encode_strides(&seg.strides, encoding, &cfg.encoders, out)
        })
        .collect::<Result<_>>()?;

    let mut seen = BTreeSet::new();
    for recs in &per_subject {
        if let Some(r) = recs.first() {
            if !seen.insert(r.subject_id.clone()) {
                return Err(Error::InvalidInput(format!("duplicate subject id {}", r.subject_id)));
            }
        }
    }
    let mut strides: Vec<StrideRecord> = per_subject.into_iter().flatten().collect();
    strides.sort_by(|a, b| (&a.subject_id, a.stride_index).cmp(&(&b.subject_id, b.stride_index)));

    let index = EncodedIndex {
        encoding,
        signal_fingerprint: fingerprint,
        tensor_shape: [IMAGE_SIZE, IMAGE_SIZE, STACK_CHANNELS],
        strides,
    };
    write_json(&EncodedIndex::path(out, encoding), &index)?;
    write_json(&out.join(CONFIG_FILE), &cfg.record())?;
    Ok(index)
}

/// [`encode_corpus`] followed by manifest assembly; writes
/// `<out>/<manifest_name>`.
pub fn build_dataset(
    input: &Path,
    encoding: Encoding,
    mode: Mode,
    cfg: &PipelineConfig,
    out: &Path,
    manifest_name: &str,
) -> Result<DatasetManifest> {
    let index = encode_corpus(input, encoding, cfg, out)?;
    let manifest = build_manifest(&index.strides, encoding, mode, &cfg.split, &cfg.fingerprint())?;
    write_json(&out.join(manifest_name), &manifest)?;
    write_json(&out.join(CONFIG_FILE), &cfg.record())?;
    Ok(manifest)
}

/// [`build_dataset`] with the default manifest name.
pub fn build_default_dataset(
    input: &Path,
    encoding: Encoding,
    mode: Mode,
    cfg: &PipelineConfig,
    out: &Path,
) -> Result<DatasetManifest> {
    build_dataset(input, encoding, mode, cfg, out, MANIFEST_FILE)
}
