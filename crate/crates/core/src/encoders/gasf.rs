//! Piecewise aggregate approximation and the Gramian angular summation field.

use super::Matrix;
use crate::error::{Error, Result};

/// Means over `n` equal-measure segments; samples straddling a boundary
/// are shared in proportion to their overlap.
pub fn paa(x: &[f64], n: usize) -> Result<Vec<f64>> {
    let len = x.len();
    if n == 0 || n > len {
        return Err(Error::InvalidInput(format!(
            "paa needs 1 <= n <= len, got n={n} len={len}"
        )));
    }
    if n == len {
        return Ok(x.to_vec());
    }
    // In units of 1/n samples: sample j spans [j*n, (j+1)*n), segment i spans [i*len, (i+1)*len).
    Ok((0..n)
        .map(|i| {
            let seg_lo = i * len;
            let seg_hi = seg_lo + len;
            let first = seg_lo / n;
            let last = (seg_hi - 1) / n;
            let sum: f64 = (first..=last)
                .map(|j| {
                    let overlap = seg_hi.min((j + 1) * n) - seg_lo.max(j * n);
                    overlap as f64 * x[j]
                })
                .sum();
            sum / len as f64
        })
        .collect())
}

/// `G[i][j] = cos(phi_i + phi_j)` with `phi = arccos(x)`; inputs are clamped to `[-1, 1]`.
pub fn gasf(x: &[f64]) -> Matrix {
    let phi: Vec<f64> = x.iter().map(|v| v.clamp(-1.0, 1.0).acos()).collect();
    let n = phi.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = (phi[i] + phi[j]).cos();
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}
