//! Heel-strike detection on sagittal foot angular velocity and stride cutting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ChannelSet, FrailtyLabel};

/// Window over which a trough candidate must stay the minimum.
const TROUGH_LOOKAHEAD_S: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeelStrikeParams {
    pub min_stride_s: f64,
    pub max_stride_s: f64,
    /// Fraction of the global maximum a mid-swing peak must reach.
    pub swing_peak_frac: f64,
}

impl Default for HeelStrikeParams {
    fn default() -> Self {
        HeelStrikeParams {
            min_stride_s: 0.6,
            max_stride_s: 2.5,
            swing_peak_frac: 0.3,
        }
    }
}

impl HeelStrikeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_stride_s > 0.0 && self.min_stride_s < self.max_stride_s) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < min_stride_s ({}) < max_stride_s ({})",
                self.min_stride_s, self.max_stride_s
            )));
        }
        if !(self.swing_peak_frac > 0.0 && self.swing_peak_frac < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "swing_peak_frac {} outside (0, 1)",
                self.swing_peak_frac
            )));
        }
        Ok(())
    }
}

/// Argmax of every maximal run of samples at or above `threshold`.
fn swing_peaks(x: &[f64], threshold: f64) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < x.len() {
        if x[i] >= threshold {
            let mut best = i;
            while i < x.len() && x[i] >= threshold {
                if x[i] > x[best] {
                    best = i;
                }
                i += 1;
            }
            peaks.push(best);
        } else {
            i += 1;
        }
    }
    peaks
}

/// Heel strikes as sample indices, strictly increasing.
///
/// Each event is the first trough after a mid-swing peak: the signal must
/// cross below zero after the peak, and the trough is followed down until
/// nothing lower lies within the next 50 ms. Events closer than
/// `min_stride_s` to the previous one are dropped.
pub fn detect_heel_strikes(gy: &[f64], fs: f64, p: &HeelStrikeParams) -> Vec<usize> {
    let n = gy.len();
    let gmax = gy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if n < 3 || gmax.is_nan() || gmax <= 0.0 {
        return Vec::new();
    }
    let peaks = swing_peaks(gy, p.swing_peak_frac * gmax);
    let max_len = (p.max_stride_s * fs).ceil() as usize;
    let min_gap = (p.min_stride_s * fs).round() as usize;
    let lookahead = ((TROUGH_LOOKAHEAD_S * fs).round() as usize).max(1);

    let mut events: Vec<usize> = Vec::new();
    for (pi, &peak) in peaks.iter().enumerate() {
        let next_peak = peaks.get(pi + 1).copied().unwrap_or(n);
        let end = next_peak.min(peak.saturating_add(max_len)).min(n);
        let Some(mut j) = (peak..end).find(|&i| gy[i] < 0.0) else {
            continue;
        };
        loop {
            let hi = (j + lookahead).min(end - 1);
            let mut k = j;
            for i in j + 1..=hi {
                if gy[i] < gy[k] {
                    k = i;
                }
            }
            if k == j {
                break;
            }
            j = k;
        }
        if let Some(&last) = events.last() {
            if j - last < min_gap {
                continue;
            }
        }
        events.push(j);
    }
    events
}

/// One right-foot gait cycle, heel strike to heel strike.
#[derive(Debug, Clone, PartialEq)]
pub struct Stride {
    pub subject_id: String,
    /// Ordinal of the HS pair this stride came from; gaps mark dropped strides.
    pub index: usize,
    pub start_idx: usize,
    /// Exclusive.
    pub end_idx: usize,
    pub sample_rate_hz: f64,
    /// The 14 feature channels clipped to `start_idx..end_idx`.
    pub channels: Vec<Vec<f64>>,
    pub label: FrailtyLabel,
    /// Left-foot heel strikes falling inside the stride (absolute indices).
    pub left_hs: Vec<usize>,
}

impl Stride {
    pub fn len(&self) -> usize {
        self.end_idx - self.start_idx
    }

    pub fn is_empty(&self) -> bool {
        self.end_idx == self.start_idx
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }
}

/// Cuts one stride per consecutive pair of right heel strikes, dropping
/// pairs whose duration lies outside `[min_stride_s, max_stride_s]`.
pub fn extract_strides(
    cs: &ChannelSet,
    hs_right: &[usize],
    hs_left: &[usize],
    p: &HeelStrikeParams,
) -> Vec<Stride> {
    let fs = cs.sample_rate_hz;
    hs_right
        .windows(2)
        .enumerate()
        .filter_map(|(k, w)| {
            let (s, e) = (w[0], w[1]);
            if e <= s || e > cs.len() {
                return None;
            }
            let dur = (e - s) as f64 / fs;
            if dur < p.min_stride_s || dur > p.max_stride_s {
                return None;
            }
            Some(Stride {
                subject_id: cs.subject_id.clone(),
                index: k,
                start_idx: s,
                end_idx: e,
                sample_rate_hz: fs,
                channels: cs.channels.iter().map(|c| c[s..e].to_vec()).collect(),
                label: cs.label,
                left_hs: hs_left.iter().copied().filter(|&h| h >= s && h < e).collect(),
            })
        })
        .collect()
}

/// Three consecutive strides of one subject, by stride index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrideTriple {
    pub subject_id: String,
    pub stride_indices: [usize; 3],
    pub label: FrailtyLabel,
}

/// Identity of a stride as seen by the triple builder.
pub trait StrideKey {
    fn subject_id(&self) -> &str;
    fn stride_index(&self) -> usize;
    fn label(&self) -> FrailtyLabel;
}

impl StrideKey for Stride {
    fn subject_id(&self) -> &str {
        &self.subject_id
    }
    fn stride_index(&self) -> usize {
        self.index
    }
    fn label(&self) -> FrailtyLabel {
        self.label
    }
}

/// Width-3, step-1 windows over runs of consecutive stride indices.
/// A run of `n` strides yields `n - 2` triples. Input must be ordered by
/// subject then index.
pub fn make_triples<S: StrideKey>(strides: &[S]) -> Vec<StrideTriple> {
    strides
        .windows(3)
        .filter(|w| {
            w[1].stride_index() == w[0].stride_index() + 1
                && w[2].stride_index() == w[1].stride_index() + 1
                && w[1].subject_id() == w[0].subject_id()
                && w[2].subject_id() == w[0].subject_id()
                && w[1].label() == w[0].label()
                && w[2].label() == w[0].label()
        })
        .map(|w| StrideTriple {
            subject_id: w[0].subject_id().to_string(),
            stride_indices: [w[0].stride_index(), w[1].stride_index(), w[2].stride_index()],
            label: w[0].label(),
        })
        .collect()
}
