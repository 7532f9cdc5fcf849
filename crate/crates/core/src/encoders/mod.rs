//! Time series → image encoders (STFT spectrogram, Morse CWT scalogram,
//! GASF) and per-stride image stacking.

mod cwt;
mod gasf;
mod render;
mod stft;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cwt::{cwt_scalogram, CwtConfig};
pub use gasf::{gasf, paa};
pub use render::{
    colormap, colormap_index, intensities, luminance, parse_colormap, render_image, resize_bilinear, Colormap,
    EncodedImage, DB_FLOOR,
};
pub use stft::{gaussian_window, stft_spectrogram, StftConfig};

use crate::dataset::Tensor3;
use crate::error::{Error, Result};
use crate::ingest::{CHANNEL_COUNT, CHANNEL_NAMES};
use crate::segmentation::Stride;

/// Side length of every rendered image.
pub const IMAGE_SIZE: usize = 224;

/// Channels in a stacked tensor: 14 features × RGB.
pub const STACK_CHANNELS: usize = CHANNEL_COUNT * 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Stft,
    Cwt,
    Gasf,
}

impl Encoding {
    pub const ALL: [Encoding; 3] = [Encoding::Stft, Encoding::Cwt, Encoding::Gasf];

    pub fn as_str(self) -> &'static str {
        match self {
            Encoding::Stft => "stft",
            Encoding::Cwt => "cwt",
            Encoding::Gasf => "gasf",
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stft" => Ok(Encoding::Stft),
            "cwt" => Ok(Encoding::Cwt),
            "gasf" => Ok(Encoding::Gasf),
            other => Err(Error::InvalidInput(format!("unknown encoding `{other}`"))),
        }
    }
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, v: f64) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Row index of the largest entry in column `c` (first on ties).
    pub fn argmax_in_col(&self, c: usize) -> usize {
        (0..self.rows).fold(0, |best, r| if self.get(r, c) > self.get(best, c) { r } else { best })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderConfig {
    pub stft: StftConfig,
    pub cwt: CwtConfig,
}

impl EncoderConfig {
    pub fn validate(&self, fs: f64) -> Result<()> {
        self.stft.validate(fs)?;
        self.cwt.validate(fs)
    }
}

/// Raw encoder output for one channel, before rendering.
pub fn encode_signal(x: &[f64], fs: f64, encoding: Encoding, cfg: &EncoderConfig) -> Result<Matrix> {
    match encoding {
        Encoding::Stft => stft_spectrogram(x, fs, &cfg.stft),
        Encoding::Cwt => cwt_scalogram(x, fs, &cfg.cwt),
        Encoding::Gasf => Ok(gasf(&paa(x, IMAGE_SIZE)?)),
    }
}

/// Encodes and renders one channel of a stride.
pub fn encode_channel(stride: &Stride, channel: usize, encoding: Encoding, cfg: &EncoderConfig) -> Result<EncodedImage> {
    let x = stride
        .channels
        .get(channel)
        .ok_or_else(|| Error::InvalidInput(format!("no channel {channel}")))?;
    let m = encode_signal(x, stride.sample_rate_hz, encoding, cfg)?;
    render_image(&m, encoding, CHANNEL_NAMES[channel])
}

/// A stride's 14 rendered channels stacked as a 224×224×42 tensor in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageStack {
    pub subject_id: String,
    pub stride_index: usize,
    pub encoding: Encoding,
    pub tensor: Tensor3,
}

/// Stacks images in channel order; image `c` occupies tensor channels `3c..3c+3`.
pub fn stack_images(images: &[EncodedImage]) -> Result<Tensor3> {
    if images.len() != CHANNEL_COUNT {
        return Err(Error::InvalidInput(format!(
            "need {CHANNEL_COUNT} images, got {}",
            images.len()
        )));
    }
    let pixels = IMAGE_SIZE * IMAGE_SIZE;
    let mut data = vec![0f32; pixels * STACK_CHANNELS];
    for (c, img) in images.iter().enumerate() {
        if img.rgb.len() != pixels * 3 {
            return Err(Error::InvalidInput(format!("image {c} is not {IMAGE_SIZE}x{IMAGE_SIZE}")));
        }
        for p in 0..pixels {
            for k in 0..3 {
                data[p * STACK_CHANNELS + 3 * c + k] = img.rgb[p * 3 + k] as f32 / 255.0;
            }
        }
    }
    Tensor3::new(IMAGE_SIZE, IMAGE_SIZE, STACK_CHANNELS, data)
}

pub fn encode_stride(stride: &Stride, encoding: Encoding, cfg: &EncoderConfig) -> Result<ImageStack> {
    if stride.channels.len() != CHANNEL_COUNT {
        return Err(Error::InvalidInput(format!(
            "stride has {} channels, need {CHANNEL_COUNT}",
            stride.channels.len()
        )));
    }
    let images = (0..CHANNEL_COUNT)
        .into_par_iter()
        .map(|c| encode_channel(stride, c, encoding, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ImageStack {
        subject_id: stride.subject_id.clone(),
        stride_index: stride.index,
        encoding,
        tensor: stack_images(&images)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::FrailtyLabel;

    fn stride(len: usize, seed: usize) -> Stride {
        Stride {
            subject_id: "s".into(),
            index: 0,
            start_idx: 0,
            end_idx: len,
            sample_rate_hz: 1000.0,
            channels: (0..CHANNEL_COUNT)
                .map(|c| {
                    (0..len)
                        .map(|i| (i as f64 * 0.011 * (c + 1 + seed) as f64).sin() * 0.9)
                        .collect()
                })
                .collect(),
            label: FrailtyLabel::Robust,
            left_hs: vec![],
        }
    }

    #[test]
    fn every_encoding_yields_full_stack() {
        let s = stride(1100, 0);
        for enc in Encoding::ALL {
            let st = encode_stride(&s, enc, &EncoderConfig::default()).unwrap();
            assert_eq!(st.tensor.shape(), (224, 224, 42));
            assert!(st.tensor.data.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn identical_strides_identical_tensors() {
        let a = encode_stride(&stride(1000, 1), Encoding::Gasf, &EncoderConfig::default()).unwrap();
        let b = encode_stride(&stride(1000, 1), Encoding::Gasf, &EncoderConfig::default()).unwrap();
        assert_eq!(a.tensor.data, b.tensor.data);
    }

    #[test]
    fn stacking_order() {
        let s = stride(900, 2);
        let cfg = EncoderConfig::default();
        let st = encode_stride(&s, Encoding::Cwt, &cfg).unwrap();
        for c in [0, 7, 13] {
            let img = encode_channel(&s, c, Encoding::Cwt, &cfg).unwrap();
            let p = 224 * 100 + 37;
            for k in 0..3 {
                assert_eq!(st.tensor.data[p * 42 + 3 * c + k], img.rgb[p * 3 + k] as f32 / 255.0);
            }
        }
    }

    #[test]
    fn encoding_parse() {
        assert_eq!("gasf".parse::<Encoding>().unwrap(), Encoding::Gasf);
        assert!("gadf".parse::<Encoding>().is_err());
    }
}
