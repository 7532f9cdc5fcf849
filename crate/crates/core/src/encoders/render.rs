//! Matrix → 224×224 RGB rendering through the shipped colormap.

use std::path::Path;
use std::sync::LazyLock;

use super::{Encoding, Matrix, IMAGE_SIZE};
use crate::error::{Error, Result};

pub type Colormap = [[u8; 3]; 256];

/// Floor applied to power spectra before min-max scaling, relative to the peak.
pub const DB_FLOOR: f64 = -80.0;

static COLORMAP: LazyLock<Colormap> = LazyLock::new(|| {
    parse_colormap(include_str!("../../assets/colormap.csv")).expect("bundled colormap is valid")
});

/// The bundled 256-entry colormap (non-decreasing luminance).
pub fn colormap() -> &'static Colormap {
    &COLORMAP
}

/// Parses 256 lines of `r,g,b` bytes.
pub fn parse_colormap(text: &str) -> Result<Colormap> {
    let mut out = [[0u8; 3]; 256];
    let mut count = 0;
    for (i, line) in text.lines().map(str::trim).filter(|l| !l.is_empty()).enumerate() {
        if i >= 256 {
            return Err(Error::Format("colormap has more than 256 entries".into()));
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Format(format!("colormap line {}: expected r,g,b", i + 1)));
        }
        for (c, p) in parts.iter().enumerate() {
            out[i][c] = p
                .parse()
                .map_err(|_| Error::Format(format!("colormap line {}: bad byte `{p}`", i + 1)))?;
        }
        count += 1;
    }
    if count != 256 {
        return Err(Error::Format(format!("colormap has {count} entries, need 256")));
    }
    Ok(out)
}

/// Rec. 709 luma of an 8-bit RGB triple.
pub fn luminance(rgb: [u8; 3]) -> f64 {
    0.2126 * rgb[0] as f64 + 0.7152 * rgb[1] as f64 + 0.0722 * rgb[2] as f64
}

/// Bilinear resize with pixel-centre alignment. Equal sizes return a copy.
pub fn resize_bilinear(m: &Matrix, rows: usize, cols: usize) -> Matrix {
    if m.rows == rows && m.cols == cols {
        return m.clone();
    }
    let axis = |out_len: usize, in_len: usize| -> Vec<(usize, usize, f64)> {
        (0..out_len)
            .map(|i| {
                let src = ((i as f64 + 0.5) * in_len as f64 / out_len as f64 - 0.5)
                    .clamp(0.0, (in_len - 1) as f64);
                let i0 = src.floor() as usize;
                let i1 = (i0 + 1).min(in_len - 1);
                (i0, i1, src - i0 as f64)
            })
            .collect()
    };
    let ys = axis(rows, m.rows);
    let xs = axis(cols, m.cols);
    let mut out = Matrix::zeros(rows, cols);
    for (r, &(y0, y1, ty)) in ys.iter().enumerate() {
        for (c, &(x0, x1, tx)) in xs.iter().enumerate() {
            let top = (1.0 - tx) * m.get(y0, x0) + tx * m.get(y0, x1);
            let bottom = (1.0 - tx) * m.get(y1, x0) + tx * m.get(y1, x1);
            out.set(r, c, (1.0 - ty) * top + ty * bottom);
        }
    }
    out
}

fn min_max_unit(values: &mut [f64]) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if range > 0.0 {
        values.iter_mut().for_each(|v| *v = (*v - lo) / range);
    } else {
        values.fill(0.0);
    }
}

/// Maps an encoder output to intensities in `[0, 1]` at its native size.
/// Power spectra go to dB relative to their peak (floored at [`DB_FLOOR`])
/// then min-max; GASF maps `[-1, 1]` linearly.
pub fn intensities(m: &Matrix, encoding: Encoding) -> Result<Matrix> {
    if let Some(i) = m.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: i / m.cols.max(1),
            col: i % m.cols.max(1),
        });
    }
    let mut out = m.clone();
    match encoding {
        Encoding::Stft | Encoding::Cwt => {
            let peak = m.data.iter().copied().fold(0.0, f64::max);
            if peak > 0.0 {
                let floor = peak * 10f64.powf(DB_FLOOR / 10.0);
                out.data
                    .iter_mut()
                    .for_each(|v| *v = 10.0 * (v.max(floor) / peak).log10());
                min_max_unit(&mut out.data);
            } else {
                out.data.fill(0.0);
            }
        }
        Encoding::Gasf => out
            .data
            .iter_mut()
            .for_each(|v| *v = ((*v + 1.0) / 2.0).clamp(0.0, 1.0)),
    }
    Ok(out)
}

pub fn colormap_index(v: f64) -> usize {
    (v.clamp(0.0, 1.0) * 255.0).round() as usize
}

/// One rendered 224×224 image of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    pub encoding: Encoding,
    pub channel_name: String,
    /// Resized intensities in `[0, 1]`.
    pub matrix: Matrix,
    /// Row-major RGB bytes.
    pub rgb: Vec<u8>,
}

impl EncodedImage {
    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * self.matrix.cols + col) * 3;
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let img = image::RgbImage::from_raw(self.matrix.cols as u32, self.matrix.rows as u32, self.rgb.clone())
            .ok_or_else(|| Error::Format("rgb buffer does not match image size".into()))?;
        img.save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }
}

/// Scales, resizes to [`IMAGE_SIZE`]² and colours `m`.
pub fn render_image(m: &Matrix, encoding: Encoding, channel_name: &str) -> Result<EncodedImage> {
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::InvalidInput("cannot render an empty matrix".into()));
    }
    let scaled = intensities(m, encoding)?;
    let matrix = resize_bilinear(&scaled, IMAGE_SIZE, IMAGE_SIZE);
    let cmap = colormap();
    let rgb = matrix
        .data
        .iter()
        .flat_map(|&v| cmap[colormap_index(v)])
        .collect();
    Ok(EncodedImage {
        encoding,
        channel_name: channel_name.to_string(),
        matrix,
        rgb,
    })
}
