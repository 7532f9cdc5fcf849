//! # gaitframe
//!
//! Turns walking IMU recordings (pelvis + both feet, 6-axis, ~100 Hz) into
//! image-stack datasets for convolutional frailty classifiers.
//!
//! ```text
//! subject dir (pelvis.csv, left_foot.csv, right_foot.csv, subject.json)
//!   │
//!   ├─ ingest::parse_recording      CSV + label → ImuRecording
//!   ├─ ingest::derive_channels      14 feature channels (+ raw foot gy)
//!   ├─ preprocess::preprocess_all   band-pass 0.1–15 Hz → cubic spline to 1 kHz → [-1, 1]
//!   ├─ segmentation                 heel strikes → strides → 3-stride windows
//!   ├─ encoders                     STFT / CWT / GASF → 224×224 RGB per channel
//!   │                               → 224×224×42 stack per stride
//!   └─ dataset                      .gft tensors + manifest.json + stratified folds
//! ```
//!
//! [`synth`] generates labelled recordings with exact heel-strike ground
//! truth, which is what the test-suite and the runnable examples use.
//!
//! Runnable examples live under `crates/core/examples/`:
//!
//! ```bash
//! cargo run --release -p gaitframe --example synthetic_corpus
//! cargo run --release -p gaitframe --example build_dataset
//! ```

pub mod cli;
pub mod config;
pub mod dataset;
pub mod encoders;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod preprocess;
pub mod segmentation;
pub mod synth;

pub use config::PipelineConfig;
pub use dataset::{DatasetManifest, Mode, Tensor3};
pub use encoders::{EncodedImage, Encoding, ImageStack};
pub use error::{Error, Result};
pub use ingest::{ChannelSet, FrailtyLabel, ImuRecording, SensorSeries};
pub use segmentation::{HeelStrikeParams, Stride, StrideTriple};
