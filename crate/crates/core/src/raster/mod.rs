//! 8-bit interleaved image buffers and the primitives every effect is built on.

mod codec;
pub(crate) mod color;
mod filter;
mod warp;

pub use codec::{decode, encode, Format};
pub use color::{color_convert, hsv_to_rgb_f, luma, luma_of, rgb_to_hsv_f, ColorTarget};
pub use filter::{gaussian_blur, gaussian_kernel, majority3, otsu_level, sobel_magnitude, threshold_otsu};
pub(crate) use filter::blur_plane;
pub use warp::{resample, warp_affine, warp_affine_to, warp_displacement, Affine, DisplacementField, Filter};

use crate::error::{Error, Result};

/// Row-major interleaved 8-bit image with one (gray) or three (RGB) channels.
#[derive(Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl std::fmt::Debug for Raster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Raster")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!("zero dimension {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidRaster(format!("unsupported channel count {channels}")));
        }
        if samples.len() != width * height * channels {
            return Err(Error::InvalidRaster(format!(
                "expected {} samples for {width}x{height}x{channels}, got {}",
                width * height * channels,
                samples.len()
            )));
        }
        Ok(Self { width, height, channels, samples })
    }

    /// Constant raster. Panics on zero dimensions or a channel count other than 1 or 3.
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Self {
        Self::new(width, height, channels, vec![value; width * height * channels])
            .expect("valid raster dimensions")
    }

    pub fn from_fn_gray(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, 1, samples).expect("valid raster dimensions")
    }

    pub fn from_fn_rgb(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        let mut samples = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                samples.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, 3, samples).expect("valid raster dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        (y * self.width + x) * self.channels
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = self.index(x, y);
        &self.samples[i..i + self.channels]
    }

    #[inline]
    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let i = self.index(x, y);
        let c = self.channels;
        &mut self.samples[i..i + c]
    }

    /// Pixel as RGB, replicating gray.
    #[inline]
    pub fn rgb(&self, x: usize, y: usize) -> [u8; 3] {
        let p = self.pixel(x, y);
        if self.channels == 1 {
            [p[0]; 3]
        } else {
            [p[0], p[1], p[2]]
        }
    }

    pub fn is_constant(&self) -> bool {
        let px = self.pixel(0, 0).to_vec();
        self.samples.chunks_exact(self.channels).all(|p| p == px.as_slice())
    }

    /// Gray rasters become RGB by replication; RGB rasters are returned as-is.
    pub fn to_rgb(&self) -> Raster {
        color_convert(self, ColorTarget::Rgb)
    }

    pub fn to_gray(&self) -> Raster {
        color_convert(self, ColorTarget::Gray)
    }

    /// Replicates or reduces to `channels`.
    pub fn with_channels(&self, channels: usize) -> Raster {
        match (self.channels, channels) {
            (a, b) if a == b => self.clone(),
            (_, 1) => self.to_gray(),
            _ => self.to_rgb(),
        }
    }

    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<Raster> {
        if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
            return Err(Error::InvalidRaster(format!(
                "crop {w}x{h}+{x}+{y} outside {}x{}",
                self.width, self.height
            )));
        }
        let c = self.channels;
        let mut out = Vec::with_capacity(w * h * c);
        for row in y..y + h {
            let start = self.index(x, row);
            out.extend_from_slice(&self.samples[start..start + w * c]);
        }
        Raster::new(w, h, c, out)
    }

    pub fn flip_horizontal(&self) -> Raster {
        let c = self.channels;
        let mut out = vec![0u8; self.samples.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                let src = self.index(x, y);
                let dst = self.index(self.width - 1 - x, y);
                out[dst..dst + c].copy_from_slice(&self.samples[src..src + c]);
            }
        }
        self.with_samples(out)
    }

    pub fn flip_vertical(&self) -> Raster {
        let row = self.width * self.channels;
        let mut out = Vec::with_capacity(self.samples.len());
        for y in (0..self.height).rev() {
            out.extend_from_slice(&self.samples[y * row..(y + 1) * row]);
        }
        self.with_samples(out)
    }

    /// Applies a lookup table to every sample.
    pub fn map_lut(&self, lut: &[u8; 256]) -> Raster {
        let samples = self.samples.iter().map(|&v| lut[v as usize]).collect();
        self.with_samples(samples)
    }

    /// Same shape, new buffer. The buffer length must match.
    pub(crate) fn with_samples(&self, samples: Vec<u8>) -> Raster {
        debug_assert_eq!(samples.len(), self.samples.len());
        Raster { width: self.width, height: self.height, channels: self.channels, samples }
    }
}

/// Rounds half away from zero and clamps into the 8-bit range.
#[inline]
pub fn clamp_u8(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    let r = v.round();
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}
