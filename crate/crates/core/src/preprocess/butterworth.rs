//! Butterworth band-pass design as cascaded second-order sections, and
//! zero-phase (forward-backward) application.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// One second-order section, `a[0] == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    fn response(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        let zi2 = zi * zi;
        (self.b[0] + self.b[1] * zi + self.b[2] * zi2) / (self.a[0] + self.a[1] * zi + self.a[2] * zi2)
    }

    fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }

    /// Transposed direct-form II state after settling on a unit step.
    fn step_state(&self) -> [f64; 2] {
        let y = self.dc_gain();
        let z2 = self.b[2] - self.a[2] * y;
        let z1 = y - self.b[0];
        [z1, z2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosFilter {
    pub sections: Vec<Biquad>,
}

impl SosFilter {
    /// Edge padding used by [`SosFilter::filtfilt`]: three times the
    /// equivalent transfer-function length.
    pub fn padlen(&self) -> usize {
        3 * (2 * self.sections.len() + 1)
    }

    /// Magnitude response at `freq_hz` for one pass.
    pub fn magnitude(&self, freq_hz: f64, fs: f64) -> f64 {
        let z = Complex64::from_polar(1.0, 2.0 * PI * freq_hz / fs);
        self.sections
            .iter()
            .map(|s| s.response(z))
            .fold(Complex64::new(1.0, 0.0), |acc, h| acc * h)
            .norm()
    }

    fn initial_state(&self, x0: f64) -> Vec<[f64; 2]> {
        let mut scale = x0;
        self.sections
            .iter()
            .map(|s| {
                let [z1, z2] = s.step_state();
                let st = [z1 * scale, z2 * scale];
                scale *= s.dc_gain();
                st
            })
            .collect()
    }

    /// Single causal pass. `state` holds one `[z1, z2]` per section.
    pub fn filter_with_state(&self, x: &[f64], state: &mut [[f64; 2]]) -> Vec<f64> {
        let mut y = x.to_vec();
        for (s, st) in self.sections.iter().zip(state.iter_mut()) {
            let [b0, b1, b2] = s.b;
            let [_, a1, a2] = s.a;
            let [mut z1, mut z2] = *st;
            for v in y.iter_mut() {
                let input = *v;
                let out = b0 * input + z1;
                z1 = b1 * input - a1 * out + z2;
                z2 = b2 * input - a2 * out;
                *v = out;
            }
            *st = [z1, z2];
        }
        y
    }

    /// Forward-backward filtering with odd-reflection padding and
    /// steady-state initial conditions; the result has zero phase and the
    /// squared magnitude response.
    pub fn filtfilt(&self, x: &[f64]) -> Result<Vec<f64>> {
        let pad = self.padlen();
        let n = x.len();
        if n <= pad {
            return Err(Error::SignalTooShort { needed: pad, got: n });
        }
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

        let mut state = self.initial_state(ext[0]);
        let mut y = self.filter_with_state(&ext, &mut state);
        y.reverse();
        let mut state = self.initial_state(y[0]);
        let mut y = self.filter_with_state(&y, &mut state);
        y.reverse();
        Ok(y[pad..pad + n].to_vec())
    }
}

fn bilinear(s: Complex64, fs: f64) -> Complex64 {
    (2.0 * fs + s) / (2.0 * fs - s)
}

/// Designs an `order`-th order Butterworth band-pass (`order` sections,
/// `2 * order` poles) with the bilinear transform and pre-warped edges.
/// Each section is scaled to unit gain at the digital centre frequency.
pub fn butter_bandpass(order: usize, low_hz: f64, high_hz: f64, fs: f64) -> Result<SosFilter> {
    if order == 0 {
        return Err(Error::InvalidConfig("filter order must be >= 1".into()));
    }
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0) {
        return Err(Error::InvalidConfig(format!(
            "band edges must satisfy 0 < {low_hz} < {high_hz} < fs/2 = {}",
            fs / 2.0
        )));
    }
    let w_lo = 2.0 * fs * (PI * low_hz / fs).tan();
    let w_hi = 2.0 * fs * (PI * high_hz / fs).tan();
    let bw = w_hi - w_lo;
    let w0 = (w_lo * w_hi).sqrt();

    let n = order as f64;
    let mut complex_poles = Vec::new();
    let mut real_poles = Vec::new();
    for k in 0..order {
        let theta = PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n);
        let proto = Complex64::from_polar(1.0, theta);
        let p_lp = proto * (bw / 2.0);
        let d = (p_lp * p_lp - w0 * w0).sqrt();
        for s in [p_lp + d, p_lp - d] {
            let z = bilinear(s, fs);
            if z.im.abs() <= 1e-12 * z.norm().max(1.0) {
                real_poles.push(z.re);
            } else if z.im > 0.0 {
                complex_poles.push(z);
            }
        }
    }
    real_poles.sort_by(f64::total_cmp);
    if real_poles.len() % 2 != 0 || complex_poles.len() + real_poles.len() / 2 != order {
        return Err(Error::InvalidConfig(format!(
            "pole pairing failed for order {order} band [{low_hz}, {high_hz}] Hz at fs {fs}"
        )));
    }

    let mut denominators: Vec<[f64; 3]> = complex_poles
        .iter()
        .map(|p| [1.0, -2.0 * p.re, p.norm_sqr()])
        .collect();
    denominators.extend(real_poles.chunks(2).map(|pr| [1.0, -(pr[0] + pr[1]), pr[0] * pr[1]]));

    let wc = 2.0 * (w0 / (2.0 * fs)).atan();
    let zc = Complex64::from_polar(1.0, wc);
    let sections = denominators
        .into_iter()
        .map(|a| {
            let raw = Biquad { b: [1.0, 0.0, -1.0], a };
            let g = 1.0 / raw.response(zc).norm();
            Biquad {
                b: [g, 0.0, -g],
                a,
            }
        })
        .collect();
    Ok(SosFilter { sections })
}
