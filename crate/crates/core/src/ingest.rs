//! Raw recording parsing and the 14-channel feature derivation.
//!
//! A subject directory holds one CSV per sensor plus `subject.json`:
//!
//! ```text
//! <subject>/
//!   pelvis.csv       t,ax,ay,az,gx,gy,gz
//!   left_foot.csv    t,ax,ay,az,gx,gy,gz
//!   right_foot.csv   t,ax,ay,az,gx,gy,gz
//!   subject.json     {"id": "...", "frail_score": 0..5}
//! ```
//!
//! Time is in seconds, accelerations in m/s², angular velocities in rad/s.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = ["t", "ax", "ay", "az", "gx", "gy", "gz"];

pub const SENSOR_FILES: [&str; 3] = ["pelvis.csv", "left_foot.csv", "right_foot.csv"];

pub const SUBJECT_FILE: &str = "subject.json";

pub const CHANNEL_COUNT: usize = 14;

/// Feature channel names in stacking order: pelvis (6), right foot (4), left foot (4).
pub const CHANNEL_NAMES: [&str; CHANNEL_COUNT] = [
    "pelvis_ax",
    "pelvis_ay",
    "pelvis_az",
    "pelvis_gx",
    "pelvis_gy",
    "pelvis_gz",
    "right_axy",
    "right_az",
    "right_gxy",
    "right_gz",
    "left_axy",
    "left_az",
    "left_gxy",
    "left_gz",
];

pub fn channel_index(name: &str) -> Option<usize> {
    CHANNEL_NAMES.iter().position(|n| *n == name)
}

/// Binary frailty class derived from the FRAIL score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrailtyLabel {
    Robust,
    NonRobust,
}

impl FrailtyLabel {
    /// Robust iff the score is zero.
    pub fn from_score(score: u8) -> Self {
        if score == 0 {
            FrailtyLabel::Robust
        } else {
            FrailtyLabel::NonRobust
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FrailtyLabel::Robust => "robust",
            FrailtyLabel::NonRobust => "non_robust",
        }
    }
}

/// One sensor's 6-axis time series.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SensorSeries {
    pub ax: Vec<f64>,
    pub ay: Vec<f64>,
    pub az: Vec<f64>,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub gz: Vec<f64>,
}

impl SensorSeries {
    pub fn with_capacity(n: usize) -> Self {
        SensorSeries {
            ax: Vec::with_capacity(n),
            ay: Vec::with_capacity(n),
            az: Vec::with_capacity(n),
            gx: Vec::with_capacity(n),
            gy: Vec::with_capacity(n),
            gz: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.ax.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ax.is_empty()
    }

    pub fn axes(&self) -> [&[f64]; 6] {
        [&self.ax, &self.ay, &self.az, &self.gx, &self.gy, &self.gz]
    }

    fn push(&mut self, v: [f64; 6]) {
        self.ax.push(v[0]);
        self.ay.push(v[1]);
        self.az.push(v[2]);
        self.gx.push(v[3]);
        self.gy.push(v[4]);
        self.gz.push(v[5]);
    }

    fn axes_consistent(&self) -> bool {
        let n = self.len();
        self.axes().iter().all(|a| a.len() == n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImuRecording {
    pub subject_id: String,
    pub sample_rate_hz: f64,
    pub pelvis: SensorSeries,
    pub left_foot: SensorSeries,
    pub right_foot: SensorSeries,
    pub frail_score: u8,
}

impl ImuRecording {
    pub fn label(&self) -> FrailtyLabel {
        FrailtyLabel::from_score(self.frail_score)
    }

    pub fn len(&self) -> usize {
        self.pelvis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pelvis.is_empty()
    }

    pub fn sensors(&self) -> [(&'static str, &SensorSeries); 3] {
        [
            ("pelvis", &self.pelvis),
            ("left_foot", &self.left_foot),
            ("right_foot", &self.right_foot),
        ]
    }

    /// Checks the recording invariants. All three sensors must share one length,
    /// which the fixed-width channel set needs.
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if self.frail_score > 5 {
            return Err(Error::FrailScore(self.frail_score as i64));
        }
        let n = self.pelvis.len();
        for (name, s) in self.sensors() {
            if s.is_empty() {
                return Err(Error::InvalidInput(format!("{name}: empty series")));
            }
            if !s.axes_consistent() {
                return Err(Error::InvalidInput(format!("{name}: axes differ in length")));
            }
            if s.len() != n {
                return Err(Error::InvalidInput(format!(
                    "{name}: {} samples, pelvis has {n}",
                    s.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SubjectMeta {
    id: String,
    frail_score: i64,
}

/// Reads one sensor CSV, returning timestamps and axes.
fn read_sensor_csv(path: &Path) -> Result<(Vec<f64>, SensorSeries)> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let malformed = |line: usize, msg: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| malformed(0, e.to_string()))?;

    let headers = rdr.headers().map_err(|e| malformed(1, e.to_string()))?;
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(malformed(
            1,
            format!("expected header `{}`", CSV_HEADER.join(",")),
        ));
    }

    let mut t = Vec::new();
    let mut series = SensorSeries::default();
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| malformed(line, e.to_string()))?;
        if rec.len() != 7 {
            return Err(malformed(line, format!("expected 7 fields, got {}", rec.len())));
        }
        let mut vals = [0.0f64; 7];
        for (i, field) in rec.iter().enumerate() {
            vals[i] = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| malformed(line, format!("bad number `{field}`")))?;
        }
        if let Some(&prev) = t.last() {
            if vals[0] <= prev {
                return Err(Error::NonMonotonicTime {
                    path: path.to_path_buf(),
                    row: line,
                });
            }
        }
        t.push(vals[0]);
        series.push([vals[1], vals[2], vals[3], vals[4], vals[5], vals[6]]);
    }
    if t.is_empty() {
        return Err(malformed(2, "no data rows".into()));
    }
    Ok((t, series))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Estimates the sample rate as `1 / median(Δt)`.
pub fn estimate_sample_rate(t: &[f64]) -> Option<f64> {
    if t.len() < 2 {
        return None;
    }
    let dt: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    Some(1.0 / median(dt))
}

/// Parses a subject directory into an [`ImuRecording`].
pub fn parse_recording(root: impl AsRef<Path>) -> Result<ImuRecording> {
    let root = root.as_ref();
    let meta_path = root.join(SUBJECT_FILE);
    if !meta_path.is_file() {
        return Err(Error::MissingFile(meta_path));
    }
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: SubjectMeta = serde_json::from_str(&meta_text).map_err(|e| Error::Malformed {
        path: meta_path.clone(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    if !(0..=5).contains(&meta.frail_score) {
        return Err(Error::FrailScore(meta.frail_score));
    }

    let (t_pelvis, pelvis) = read_sensor_csv(&root.join(SENSOR_FILES[0]))?;
    let (_, left_foot) = read_sensor_csv(&root.join(SENSOR_FILES[1]))?;
    let (_, right_foot) = read_sensor_csv(&root.join(SENSOR_FILES[2]))?;

    let sample_rate_hz = estimate_sample_rate(&t_pelvis).ok_or_else(|| Error::Malformed {
        path: root.join(SENSOR_FILES[0]),
        line: 2,
        msg: "need at least two rows to estimate the sample rate".into(),
    })?;

    let rec = ImuRecording {
        subject_id: meta.id,
        sample_rate_hz,
        pelvis,
        left_foot,
        right_foot,
        frail_score: meta.frail_score as u8,
    };
    rec.validate()?;
    Ok(rec)
}

/// Writes `rec` in the directory layout read by [`parse_recording`].
/// Timestamps are `i / sample_rate_hz`.
pub fn write_recording(rec: &ImuRecording, root: impl AsRef<Path>) -> Result<()> {
    rec.validate()?;
    let root = root.as_ref();
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    for (file, (_, sensor)) in SENSOR_FILES.iter().zip(rec.sensors()) {
        let path = root.join(file);
        let mut out = String::with_capacity(sensor.len() * 80);
        out.push_str(&CSV_HEADER.join(","));
        out.push('\n');
        let axes = sensor.axes();
        for (i, ax) in axes[0].iter().enumerate() {
            let t = i as f64 / rec.sample_rate_hz;
            out.push_str(&format!(
                "{t},{ax},{},{},{},{},{}\n",
                axes[1][i], axes[2][i], axes[3][i], axes[4][i], axes[5][i]
            ));
        }
        fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    }
    let meta_path = root.join(SUBJECT_FILE);
    let meta = SubjectMeta {
        id: rec.subject_id.clone(),
        frail_score: rec.frail_score as i64,
    };
    let mut f = fs::File::create(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    f.write_all(b"\n").map_err(|e| Error::io(&meta_path, e))?;
    Ok(())
}

/// The 14 feature channels of one subject, plus each foot's raw sagittal
/// angular velocity (gy) which segmentation needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    pub subject_id: String,
    pub sample_rate_hz: f64,
    pub label: FrailtyLabel,
    /// Always `CHANNEL_COUNT` series, ordered as [`CHANNEL_NAMES`].
    pub channels: Vec<Vec<f64>>,
    pub right_gy: Vec<f64>,
    pub left_gy: Vec<f64>,
}

impl ChannelSet {
    pub fn len(&self) -> usize {
        self.right_gy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.right_gy.is_empty()
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        channel_index(name).map(|i| self.channels[i].as_slice())
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.len() != CHANNEL_COUNT {
            return Err(Error::InvalidInput(format!(
                "expected {CHANNEL_COUNT} channels, got {}",
                self.channels.len()
            )));
        }
        let n = self.len();
        if self.left_gy.len() != n || self.channels.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("channel lengths differ".into()));
        }
        Ok(())
    }
}

fn foot_features(foot: &SensorSeries) -> [Vec<f64>; 4] {
    let axy = foot.ax.iter().zip(&foot.ay).map(|(x, y)| x.hypot(*y)).collect();
    let gxy = foot.gx.iter().zip(&foot.gy).map(|(x, y)| x.hypot(*y)).collect();
    [axy, foot.az.clone(), gxy, foot.gz.clone()]
}

/// Pelvis keeps its six axes; each foot contributes `|a_xy|`, `a_z`, `|g_xy|`, `g_z`.
pub fn derive_channels(rec: &ImuRecording) -> Result<ChannelSet> {
    rec.validate()?;
    let p = &rec.pelvis;
    let mut channels = vec![
        p.ax.clone(),
        p.ay.clone(),
        p.az.clone(),
        p.gx.clone(),
        p.gy.clone(),
        p.gz.clone(),
    ];
    channels.extend(foot_features(&rec.right_foot));
    channels.extend(foot_features(&rec.left_foot));
    Ok(ChannelSet {
        subject_id: rec.subject_id.clone(),
        sample_rate_hz: rec.sample_rate_hz,
        label: rec.label(),
        channels,
        right_gy: rec.right_foot.gy.clone(),
        left_gy: rec.left_foot.gy.clone(),
    })
}
