//! Not-a-knot cubic spline on a uniform grid (unit knot spacing).

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NotAKnotSpline {
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NotAKnotSpline {
    /// Fits through `y[i]` at abscissa `i`. Needs at least four knots.
    pub fn fit(y: &[f64]) -> Result<Self> {
        let n = y.len();
        if n < 4 {
            return Err(Error::SignalTooShort { needed: 3, got: n });
        }
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 || i == n - 1 {
                    0.0
                } else {
                    6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1])
                }
            })
            .collect();

        // With uniform spacing the not-a-knot conditions fold into rows 1 and
        // n-2, fixing m[1] and m[n-2] directly. The rest is tridiagonal.
        let mut m = vec![0.0; n];
        m[1] = rhs[1] / 6.0;
        m[n - 2] = rhs[n - 2] / 6.0;

        let lo = 2;
        let hi = n - 3;
        if hi >= lo {
            let k = hi - lo + 1;
            let mut d = vec![0.0; k];
            for (j, di) in d.iter_mut().enumerate() {
                *di = rhs[lo + j];
            }
            d[0] -= m[1];
            d[k - 1] -= m[n - 2];
            // Thomas algorithm for diag 4, off-diagonals 1.
            let mut c = vec![0.0; k];
            let mut beta = 4.0;
            d[0] /= beta;
            for j in 1..k {
                c[j - 1] = 1.0 / beta;
                beta = 4.0 - c[j - 1];
                d[j] = (d[j] - d[j - 1]) / beta;
            }
            for j in (0..k - 1).rev() {
                d[j] -= c[j] * d[j + 1];
            }
            m[lo..=hi].copy_from_slice(&d);
        }
        m[0] = 2.0 * m[1] - m[2];
        m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
        Ok(NotAKnotSpline { y: y.to_vec(), m })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Evaluates at `u` (clamped to `[0, n-1]`). Knots are reproduced exactly.
    pub fn eval(&self, u: f64) -> f64 {
        let n = self.y.len();
        let u = u.clamp(0.0, (n - 1) as f64);
        let i = (u.floor() as usize).min(n - 2);
        let s = u - i as f64;
        let r = 1.0 - s;
        r * self.y[i]
            + s * self.y[i + 1]
            + (r * r * r - r) * self.m[i] / 6.0
            + (s * s * s - s) * self.m[i + 1] / 6.0
    }
}

/// Number of samples produced when resampling `n` samples from `fs_in` to `fs_out`.
pub fn resampled_len(n: usize, fs_in: f64, fs_out: f64) -> usize {
    if n == 0 {
        return 0;
    }
    (((n - 1) as f64 * fs_out / fs_in) + 1e-9).floor() as usize + 1
}

/// Upsamples with a not-a-knot cubic spline through the input samples.
pub fn resample_cubic(signal: &[f64], fs_in: f64, fs_out: f64) -> Result<Vec<f64>> {
    if !(fs_in > 0.0 && fs_out.is_finite()) || fs_out < fs_in {
        return Err(Error::InvalidConfig(format!(
            "resampling requires fs_out >= fs_in > 0, got {fs_in} -> {fs_out}"
        )));
    }
    let spline = NotAKnotSpline::fit(signal)?;
    let n_out = resampled_len(signal.len(), fs_in, fs_out);
    Ok((0..n_out)
        .map(|k| spline.eval(k as f64 * fs_in / fs_out))
        .collect())
}
