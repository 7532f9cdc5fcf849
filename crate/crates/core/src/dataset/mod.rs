//! On-disk dataset: `.gft` stride tensors, the encoded-stride index and
//! `manifest.json` with stratified folds.
//!
//! ```text
//! <out>/
//!   config.json                     pipeline config + fingerprint
//!   manifest.json
//!   tensors/<encoding>/index.json   one record per encoded stride
//!   tensors/<encoding>/<subject>/stride_0003.gft
//! ```

mod split;
mod tensor;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

pub use split::{stratified_split, FoldSplit, SplitItem, SplitOptions};
pub use tensor::{read_tensor, write_tensor, Tensor3, HEADER_LEN, MAGIC};

use crate::encoders::{encode_stride, EncoderConfig, Encoding, IMAGE_SIZE, STACK_CHANNELS};
use crate::error::{Error, Result};
use crate::ingest::{FrailtyLabel, CHANNEL_COUNT};
use crate::segmentation::{make_triples, Stride, StrideKey};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const INDEX_FILE: &str = "index.json";
pub const MANIFEST_VERSION: u32 = 1;

/// One stride per item, or three consecutive strides per item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[value(name = "ss")]
    SingleStride,
    #[value(name = "ms")]
    MultiStride,
}

impl Mode {
    pub fn strides_per_item(self) -> usize {
        match self {
            Mode::SingleStride => 1,
            Mode::MultiStride => 3,
        }
    }
}

/// An encoded stride on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrideRecord {
    pub subject_id: String,
    pub stride_index: usize,
    pub label: FrailtyLabel,
    /// Relative to the dataset root.
    pub tensor_path: String,
    pub start_idx: usize,
    pub end_idx: usize,
    pub duration_s: f64,
}

impl StrideKey for StrideRecord {
    fn subject_id(&self) -> &str {
        &self.subject_id
    }
    fn stride_index(&self) -> usize {
        self.stride_index
    }
    fn label(&self) -> FrailtyLabel {
        self.label
    }
}

/// `tensors/<encoding>/index.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedIndex {
    pub encoding: Encoding,
    /// Fingerprint of every setting that changes tensor contents.
    pub signal_fingerprint: String,
    pub tensor_shape: [usize; 3],
    pub strides: Vec<StrideRecord>,
}

impl EncodedIndex {
    pub fn path(root: &Path, encoding: Encoding) -> std::path::PathBuf {
        root.join("tensors").join(encoding.as_str()).join(INDEX_FILE)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub robust: usize,
    pub non_robust: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.robust + self.non_robust
    }

    fn add(&mut self, label: FrailtyLabel) {
        match label {
            FrailtyLabel::Robust => self.robust += 1,
            FrailtyLabel::NonRobust => self.non_robust += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestItem {
    /// Position in `items`; fold lists refer to this.
    pub id: usize,
    /// One path per stride, relative to the dataset root.
    pub tensor_paths: Vec<String>,
    pub subject_id: String,
    pub stride_indices: Vec<usize>,
    pub label: FrailtyLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub encoding: Encoding,
    pub mode: Mode,
    /// `[height, width, channels]` of every tensor.
    pub tensor_shape: [usize; 3],
    pub items: Vec<ManifestItem>,
    /// Items per class.
    pub class_counts: ClassCounts,
    /// Distinct encoded strides available to the dataset.
    pub stride_count: usize,
    /// `stride_count` × 14 channel images.
    pub image_count: usize,
    pub split: SplitOptions,
    pub folds: Vec<FoldSplit>,
    pub config_fingerprint: String,
}

/// Relative tensor path for a stride.
pub fn tensor_rel_path(encoding: Encoding, subject_id: &str, stride_index: usize) -> String {
    format!("tensors/{}/{subject_id}/stride_{stride_index:04}.gft", encoding.as_str())
}

/// Encodes strides in parallel and writes one `.gft` per stride under
/// `root`. Records come back in input order.
pub fn encode_strides(
    strides: &[Stride],
    encoding: Encoding,
    cfg: &EncoderConfig,
    root: &Path,
) -> Result<Vec<StrideRecord>> {
    strides
        .par_iter()
        .map(|s| {
            let stack = encode_stride(s, encoding, cfg)?;
            let rel = tensor_rel_path(encoding, &s.subject_id, s.index);
            write_tensor(root.join(&rel), &stack.tensor)?;
            Ok(StrideRecord {
                subject_id: s.subject_id.clone(),
                stride_index: s.index,
                label: s.label,
                tensor_path: rel,
                start_idx: s.start_idx,
                end_idx: s.end_idx,
                duration_s: s.duration_s(),
            })
        })
        .collect()
}

/// Assembles items, class counts and folds from encoded strides. Touches
/// no files.
pub fn build_manifest(
    records: &[StrideRecord],
    encoding: Encoding,
    mode: Mode,
    split: &SplitOptions,
    config_fingerprint: &str,
) -> Result<DatasetManifest> {
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| (&a.subject_id, a.stride_index).cmp(&(&b.subject_id, b.stride_index)));
    if let Some(w) = sorted
        .windows(2)
        .find(|w| w[0].subject_id == w[1].subject_id && w[0].stride_index == w[1].stride_index)
    {
        return Err(Error::InvalidInput(format!(
            "stride {} of {} listed twice",
            w[0].stride_index, w[0].subject_id
        )));
    }

    let items: Vec<ManifestItem> = match mode {
        Mode::SingleStride => sorted
            .iter()
            .enumerate()
            .map(|(id, r)| ManifestItem {
                id,
                tensor_paths: vec![r.tensor_path.clone()],
                subject_id: r.subject_id.clone(),
                stride_indices: vec![r.stride_index],
                label: r.label,
            })
            .collect(),
        Mode::MultiStride => {
            let paths: BTreeMap<(&str, usize), &str> = sorted
                .iter()
                .map(|r| ((r.subject_id.as_str(), r.stride_index), r.tensor_path.as_str()))
                .collect();
            make_triples(&sorted)
                .into_iter()
                .enumerate()
                .map(|(id, t)| ManifestItem {
                    id,
                    tensor_paths: t
                        .stride_indices
                        .iter()
                        .map(|&i| paths[&(t.subject_id.as_str(), i)].to_string())
                        .collect(),
                    stride_indices: t.stride_indices.to_vec(),
                    subject_id: t.subject_id,
                    label: t.label,
                })
                .collect()
        }
    };
    if items.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no {} items from {} strides",
            match mode {
                Mode::SingleStride => "single-stride",
                Mode::MultiStride => "multi-stride",
            },
            records.len()
        )));
    }

    let mut class_counts = ClassCounts::default();
    for it in &items {
        class_counts.add(it.label);
    }
    let split_items: Vec<SplitItem> = items
        .iter()
        .map(|it| SplitItem {
            id: it.id,
            label: it.label,
            subject_id: &it.subject_id,
        })
        .collect();
    let folds = stratified_split(&split_items, split)?;

    Ok(DatasetManifest {
        version: MANIFEST_VERSION,
        encoding,
        mode,
        tensor_shape: [IMAGE_SIZE, IMAGE_SIZE, STACK_CHANNELS],
        items,
        class_counts,
        stride_count: sorted.len(),
        image_count: sorted.len() * CHANNEL_COUNT,
        split: split.clone(),
        folds,
        config_fingerprint: config_fingerprint.to_string(),
    })
}

impl DatasetManifest {
    /// Internal consistency, without reading tensors.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Format(format!("manifest: {m}")));
        let mut counts = ClassCounts::default();
        for (i, it) in self.items.iter().enumerate() {
            if it.id != i {
                return bad(format!("item {i} has id {}", it.id));
            }
            let k = self.mode.strides_per_item();
            if it.tensor_paths.len() != k || it.stride_indices.len() != k {
                return bad(format!("item {i} needs {k} strides"));
            }
            if it.stride_indices.windows(2).any(|w| w[1] != w[0] + 1) {
                return bad(format!("item {i} strides are not consecutive"));
            }
            counts.add(it.label);
        }
        if counts != self.class_counts {
            return bad("class_counts disagree with items".into());
        }
        if self.image_count != self.stride_count * CHANNEL_COUNT {
            return bad("image_count != stride_count * 14".into());
        }
        if self.folds.len() != self.split.folds {
            return bad(format!("{} folds, expected {}", self.folds.len(), self.split.folds));
        }
        for f in &self.folds {
            let train: BTreeSet<usize> = f.train.iter().copied().collect();
            let test: BTreeSet<usize> = f.test.iter().copied().collect();
            if train.len() + test.len() != self.items.len()
                || !train.is_disjoint(&test)
                || train.union(&test).any(|&i| i >= self.items.len())
            {
                return bad(format!("fold {} is not a partition of the items", f.fold_id));
            }
        }
        Ok(())
    }

    /// Reads every referenced tensor and checks its shape.
    pub fn verify_tensors(&self, root: &Path) -> Result<()> {
        let paths: BTreeSet<&str> = self
            .items
            .iter()
            .flat_map(|it| it.tensor_paths.iter().map(String::as_str))
            .collect();
        let want = (self.tensor_shape[0], self.tensor_shape[1], self.tensor_shape[2]);
        paths.par_iter().try_for_each(|p| {
            let t = read_tensor(root.join(p))?;
            if t.shape() != want {
                return Err(Error::Format(format!("{p}: shape {:?}, expected {want:?}", t.shape())));
            }
            Ok(())
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&s)?)
}
