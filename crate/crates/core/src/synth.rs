//! Synthetic walking recordings with exact heel-strike ground truth.
//!
//! Each heel strike (HS) event contributes a fixed template to the foot's
//! sagittal angular velocity: a toe-off trough, a positive mid-swing lobe,
//! then a sharp negative trough centred exactly on the HS time. Stride
//! periods and amplitudes are perturbed per stride from a seeded RNG. The
//! remaining axes are low-order harmonics of the gait phase.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{write_recording, FrailtyLabel, ImuRecording, SensorSeries};

pub const SYNTH_SAMPLE_RATE_HZ: f64 = 100.0;

const GRAVITY: f64 = 9.81;
const LEAD_IN_S: f64 = 1.0;
const TAIL_S: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitProfile {
    pub frail_score: u8,
    pub stride_period_mean_s: f64,
    pub stride_period_std_s: f64,
    /// Relative per-stride amplitude standard deviation.
    pub amplitude_jitter_std: f64,
    /// Additive white noise on every axis.
    pub noise_std: f64,
    /// Mid-swing lobe height, rad/s.
    pub swing_peak: f64,
    /// Swing lobe centre as a fraction of the stride after the previous HS.
    pub swing_phase: f64,
    /// Swing lobe standard deviation as a fraction of the stride period.
    pub swing_width: f64,
    pub toe_off_phase: f64,
    pub toe_off_depth: f64,
    pub heel_strike_depth: f64,
    /// Heel-strike trough standard deviation in seconds.
    pub heel_strike_width_s: f64,
}

impl GaitProfile {
    pub fn robust() -> Self {
        GaitProfile {
            frail_score: 0,
            stride_period_mean_s: 1.05,
            stride_period_std_s: 0.02,
            amplitude_jitter_std: 0.03,
            noise_std: 0.05,
            swing_peak: 5.0,
            swing_phase: 0.8,
            swing_width: 0.07,
            toe_off_phase: 0.6,
            toe_off_depth: 1.8,
            heel_strike_depth: 2.5,
            heel_strike_width_s: 0.02,
        }
    }

    pub fn non_robust() -> Self {
        GaitProfile {
            frail_score: 2,
            stride_period_mean_s: 1.25,
            stride_period_std_s: 0.10,
            amplitude_jitter_std: 0.08,
            ..Self::robust()
        }
    }

    /// No period spread, no amplitude jitter, no noise.
    pub fn deterministic(mut self) -> Self {
        self.stride_period_std_s = 0.0;
        self.amplitude_jitter_std = 0.0;
        self.noise_std = 0.0;
        self
    }

    pub fn label(&self) -> FrailtyLabel {
        FrailtyLabel::from_score(self.frail_score)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.stride_period_mean_s > 0.0
            && self.stride_period_std_s >= 0.0
            && self.amplitude_jitter_std >= 0.0
            && self.noise_std >= 0.0
            && self.heel_strike_width_s > 0.0
            && self.swing_width > 0.0
            && (0.0..1.0).contains(&self.swing_phase)
            && (0.0..1.0).contains(&self.toe_off_phase)
            && self.frail_score <= 5;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid gait profile {self:?}")))
        }
    }
}

/// Heel-strike times in seconds, per foot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub right_hs_s: Vec<f64>,
    pub left_hs_s: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SyntheticSubject {
    pub recording: ImuRecording,
    pub truth: GroundTruth,
}

#[derive(Debug, Clone, Copy)]
struct HsEvent {
    time: f64,
    period: f64,
    amp: f64,
}

fn gaussian(t: f64, centre: f64, sigma: f64) -> f64 {
    let z = (t - centre) / sigma;
    (-0.5 * z * z).exp()
}

fn sagittal_gyro(t: f64, events: &[HsEvent], p: &GaitProfile) -> f64 {
    events
        .iter()
        .map(|e| {
            let swing_c = e.time - (1.0 - p.swing_phase) * e.period;
            let toe_c = e.time - (1.0 - p.toe_off_phase) * e.period;
            e.amp
                * (p.swing_peak * gaussian(t, swing_c, p.swing_width * e.period)
                    - p.toe_off_depth * gaussian(t, toe_c, 0.04 * e.period)
                    - p.heel_strike_depth * gaussian(t, e.time, p.heel_strike_width_s))
        })
        .sum()
}

/// Continuous right-foot gait phase (integer at each right HS) and the
/// current stride's index into `periods`.
fn phase_at(t: f64, hs: &[f64], periods: &[f64]) -> (f64, usize) {
    let n = periods.len();
    if t < hs[0] {
        return ((t - hs[0]) / periods[0], 0);
    }
    if t >= hs[n] {
        return (n as f64 + (t - hs[n]) / periods[n - 1], n - 1);
    }
    let k = hs.partition_point(|&h| h <= t) - 1;
    (k as f64 + (t - hs[k]) / periods[k], k)
}

fn ramp(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    0.5 - 0.5 * (PI * x).cos()
}

/// Builds one subject's recording at [`SYNTH_SAMPLE_RATE_HZ`]. Deterministic in `seed`.
pub fn generate_subject(
    profile: &GaitProfile,
    n_strides: usize,
    seed: u64,
    subject_id: &str,
) -> Result<SyntheticSubject> {
    profile.validate()?;
    if n_strides == 0 {
        return Err(Error::InvalidInput("n_strides must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = profile.stride_period_mean_s;
    let period_dist = Normal::new(mean, profile.stride_period_std_s)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let periods: Vec<f64> = (0..n_strides)
        .map(|_| period_dist.sample(&mut rng).clamp(0.5 * mean, 1.5 * mean))
        .collect();
    let amps: Vec<f64> = (0..n_strides)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (1.0 + profile.amplitude_jitter_std * z).max(0.2)
        })
        .collect();

    let mut right_hs = Vec::with_capacity(n_strides + 1);
    right_hs.push(LEAD_IN_S);
    for p in &periods {
        right_hs.push(right_hs.last().unwrap() + p);
    }
    let left_hs: Vec<f64> = (0..n_strides)
        .map(|k| right_hs[k] + 0.5 * periods[k])
        .collect();

    let mut right_events = vec![HsEvent {
        time: right_hs[0],
        period: periods[0],
        amp: amps[0],
    }];
    right_events.extend((0..n_strides).map(|k| HsEvent {
        time: right_hs[k + 1],
        period: periods[k],
        amp: amps[k],
    }));
    let left_events: Vec<HsEvent> = (0..n_strides)
        .map(|k| HsEvent {
            time: left_hs[k],
            period: periods[k],
            amp: amps[k],
        })
        .collect();

    let fs = SYNTH_SAMPLE_RATE_HZ;
    let end = right_hs[n_strides] + TAIL_S;
    let n_samples = (end * fs).floor() as usize + 1;

    let mut pelvis = SensorSeries::with_capacity(n_samples);
    let mut right = SensorSeries::with_capacity(n_samples);
    let mut left = SensorSeries::with_capacity(n_samples);

    let start_walk = right_hs[0] - 0.6;
    let stop_walk = right_hs[n_strides];
    for i in 0..n_samples {
        let t = i as f64 / fs;
        let (ph, k) = phase_at(t, &right_hs, &periods);
        let env = ramp((t - start_walk) / 0.6) * (1.0 - ramp((t - stop_walk) / 0.4));
        let g = env * amps[k];
        let w = 2.0 * PI * ph;

        pelvis.ax.push(g * 1.2 * (2.0 * w + 0.4).sin());
        pelvis.ay.push(g * 0.8 * (w + 1.0).sin());
        pelvis.az.push(GRAVITY + g * 2.0 * (2.0 * w + 1.5).sin());
        pelvis.gx.push(g * 0.3 * w.sin());
        pelvis.gy.push(g * 0.25 * (2.0 * w + 0.8).sin());
        pelvis.gz.push(g * 0.5 * (w + 2.0).sin());

        for (foot, w, events) in [
            (&mut right, w, &right_events),
            (&mut left, w - PI, &left_events),
        ] {
            foot.ax.push(g * (2.0 * (w + 0.3).sin() + (2.0 * w + 1.1).sin()));
            foot.ay.push(g * 1.2 * (w + 1.7).sin());
            foot.az.push(GRAVITY + g * 3.0 * (w + 2.2).sin());
            foot.gx.push(g * 0.6 * (w + 0.9).sin());
            foot.gy.push(sagittal_gyro(t, events, profile));
            foot.gz.push(g * 0.4 * (2.0 * w + 0.2).sin());
        }
    }

    if profile.noise_std > 0.0 {
        let noise = Normal::new(0.0, profile.noise_std).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        for sensor in [&mut pelvis, &mut left, &mut right] {
            for axis in [
                &mut sensor.ax,
                &mut sensor.ay,
                &mut sensor.az,
                &mut sensor.gx,
                &mut sensor.gy,
                &mut sensor.gz,
            ] {
                for v in axis.iter_mut() {
                    *v += noise.sample(&mut rng);
                }
            }
        }
    }

    let recording = ImuRecording {
        subject_id: subject_id.to_string(),
        sample_rate_hz: fs,
        pelvis,
        left_foot: left,
        right_foot: right,
        frail_score: profile.frail_score,
    };
    Ok(SyntheticSubject {
        recording,
        truth: GroundTruth {
            right_hs_s: right_hs,
            left_hs_s: left_hs,
        },
    })
}

/// Built-in profile families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Robust,
    #[value(name = "nonrobust")]
    #[serde(rename = "nonrobust")]
    NonRobust,
}

impl ProfileKind {
    pub fn profile(self) -> GaitProfile {
        match self {
            ProfileKind::Robust => GaitProfile::robust(),
            ProfileKind::NonRobust => GaitProfile::non_robust(),
        }
    }

    pub fn id_prefix(self) -> &'static str {
        match self {
            ProfileKind::Robust => "robust",
            ProfileKind::NonRobust => "nonrobust",
        }
    }

    /// Seed of subject `i`: `seed * 1000 + i` for robust, `+ 500` more for
    /// non-robust, so both groups can share a seed.
    pub fn subject_seed(self, seed: u64, i: usize) -> u64 {
        let offset = match self {
            ProfileKind::Robust => 0,
            ProfileKind::NonRobust => 500,
        };
        seed.wrapping_mul(1000).wrapping_add(offset + i as u64)
    }
}

/// `n_subjects` subjects of one profile family, ids `<prefix>_000`, ...
pub fn generate_group(kind: ProfileKind, n_subjects: usize, n_strides: usize, seed: u64) -> Result<Vec<SyntheticSubject>> {
    let profile = kind.profile();
    (0..n_subjects)
        .map(|i| {
            let id = format!("{}_{i:03}", kind.id_prefix());
            generate_subject(&profile, n_strides, kind.subject_seed(seed, i), &id)
        })
        .collect()
}

/// `n_robust` robust then `n_non_robust` non-robust subjects.
pub fn generate_corpus(
    n_robust: usize,
    n_non_robust: usize,
    n_strides: usize,
    seed: u64,
) -> Result<Vec<SyntheticSubject>> {
    let mut out = generate_group(ProfileKind::Robust, n_robust, n_strides, seed)?;
    out.extend(generate_group(ProfileKind::NonRobust, n_non_robust, n_strides, seed)?);
    Ok(out)
}

pub const TRUTH_FILE: &str = "truth.json";

/// Writes the subject's CSV directory plus `truth.json` into `root`.
pub fn write_subject(subject: &SyntheticSubject, root: impl AsRef<Path>) -> Result<()> {
    let root = root.as_ref();
    write_recording(&subject.recording, root)?;
    crate::dataset::write_json(&root.join(TRUTH_FILE), &subject.truth)
}

/// Stride periods implied by consecutive HS times.
pub fn periods_from_truth(hs: &[f64]) -> Vec<f64> {
    hs.windows(2).map(|w| w[1] - w[0]).collect()
}
