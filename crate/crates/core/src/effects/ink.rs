//! Effects on the printed ink, applied before the page is printed onto paper.

use serde::{Deserialize, Serialize};

use super::{check_unit, lighten_toward_white};
use crate::effect::{EffectParams, Family};
use crate::error::{Error, Result};
use crate::raster::{clamp_u8, gaussian_blur, luma, otsu_level, sobel_magnitude, Raster};
use crate::rng::StreamRng;
use crate::params::Sampled;
use crate::synthesis::{ink_mask, make_blob_mask, BlendMode, BlobParams};

/// Verso ink showing through: a mirrored, blurred, offset copy composited darken-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BleedThrough {
    pub alpha: Sampled<f64>,
    /// 0 disables the blur.
    pub blur_sigma: Sampled<f64>,
    pub offset: [i32; 2],
}

impl Default for BleedThrough {
    fn default() -> Self {
        Self { alpha: Sampled::Range([0.15, 0.35]), blur_sigma: Sampled::Fixed(2.0), offset: [6, 4] }
    }
}

impl EffectParams for BleedThrough {
    const KIND: &'static str = "bleed_through";
    const FAMILY: Family = Family::Ink;

    fn validate(&self) -> Result<()> {
        check_unit(Self::KIND, "alpha", &self.alpha)?;
        self.blur_sigma.check(Self::KIND, "blur_sigma", 0.0, 100.0)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { alpha: self.alpha.resolve(rng), blur_sigma: self.blur_sigma.resolve(rng), offset: self.offset }
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        let alpha = self.alpha.value();
        if alpha == 0.0 {
            return Ok(img.clone());
        }
        let (w, h, c) = img.dims();
        let mut verso = img.flip_horizontal();
        let sigma = self.blur_sigma.value().min(w.min(h) as f64);
        if sigma > 0.0 {
            verso = gaussian_blur(&verso, sigma)?;
        }
        let mode = BlendMode::Normal { alpha };
        let [dx, dy] = self.offset;
        let mut out = img.clone();
        for y in 0..h {
            let sy = y as i64 - dy as i64;
            for x in 0..w {
                let sx = x as i64 - dx as i64;
                if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                    continue;
                }
                let src = verso.pixel(sx as usize, sy as usize).to_vec();
                let dst = out.pixel_mut(x, y);
                for ch in 0..c {
                    dst[ch] = dst[ch].min(mode.apply(src[ch], dst[ch]));
                }
            }
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { alpha: Sampled::Fixed(0.0), ..Self::default() })
    }
}

/// Printer streaks: selected rows have their ink lightened toward white.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowInkLines {
    pub line_count: Sampled<u32>,
    pub periodic: bool,
    pub period: Sampled<u32>,
    pub lighten: Sampled<f64>,
}

impl Default for LowInkLines {
    fn default() -> Self {
        Self {
            line_count: Sampled::Range([3, 10]),
            periodic: false,
            period: Sampled::Range([4, 10]),
            lighten: Sampled::Range([0.3, 0.7]),
        }
    }
}

impl EffectParams for LowInkLines {
    const KIND: &'static str = "low_ink_lines";
    const FAMILY: Family = Family::Ink;

    fn validate(&self) -> Result<()> {
        self.line_count.check(Self::KIND, "line_count", 0, 100_000)?;
        self.period.check(Self::KIND, "period", 1, 100_000)?;
        check_unit(Self::KIND, "lighten", &self.lighten)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self {
            line_count: self.line_count.resolve(rng),
            periodic: self.periodic,
            period: self.period.resolve(rng),
            lighten: self.lighten.resolve(rng),
        }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let (w, h, c) = img.dims();
        let mut rows = vec![false; h];
        if self.periodic {
            let period = self.period.value() as usize;
            let phase = rng.index(period);
            rows.iter_mut().enumerate().for_each(|(y, r)| *r = y % period == phase);
        } else {
            for _ in 0..self.line_count.value() {
                rows[rng.index(h)] = true;
            }
        }
        let lighten = self.lighten.value();
        let l = luma(img);
        let mut out = img.clone();
        for (y, _) in rows.iter().enumerate().filter(|(_, &r)| r) {
            for x in 0..w {
                if l[y * w + x] < 128 {
                    let i = out.index(x, y);
                    lighten_toward_white(&mut out.samples_mut()[i..i + c], lighten);
                }
            }
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { line_count: Sampled::Fixed(0), periodic: false, ..Self::default() })
    }
}

/// Fuzzy ink edges: edge pixels pick up the darkest value in their neighbourhood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InkBleed {
    pub intensity: Sampled<f64>,
    /// Window size, 3 or 5.
    pub kernel: u32,
}

impl Default for InkBleed {
    fn default() -> Self {
        Self { intensity: Sampled::Range([0.3, 0.7]), kernel: 3 }
    }
}

/// Largest Sobel magnitude on 8-bit input: 4 * 255 * sqrt(2).
const SOBEL_MAX: f64 = 1442.5;

impl EffectParams for InkBleed {
    const KIND: &'static str = "ink_bleed";
    const FAMILY: Family = Family::Ink;

    fn validate(&self) -> Result<()> {
        check_unit(Self::KIND, "intensity", &self.intensity)?;
        if self.kernel != 3 && self.kernel != 5 {
            return Err(Error::param(Self::KIND, "kernel", "must be 3 or 5"));
        }
        Ok(())
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { intensity: self.intensity.resolve(rng), kernel: self.kernel }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let intensity = self.intensity.value();
        if intensity == 0.0 {
            return Ok(img.clone());
        }
        let (w, h, c) = img.dims();
        let magnitude: Vec<u8> = sobel_magnitude(img).into_iter().map(|m| clamp_u8(m * 255.0 / SOBEL_MAX)).collect();
        let mut hist = [0u64; 256];
        magnitude.iter().for_each(|&m| hist[m as usize] += 1);
        let level = otsu_level(&hist);
        let l = luma(img);
        let r = (self.kernel / 2) as i64;
        let mut out = img.clone();
        for y in 0..h {
            for x in 0..w {
                let m = magnitude[y * w + x];
                if m == 0 || m < level {
                    continue;
                }
                if !rng.coin(intensity) {
                    continue;
                }
                let mut best = (l[y * w + x], x, y);
                for yy in (y as i64 - r).max(0)..=(y as i64 + r).min(h as i64 - 1) {
                    for xx in (x as i64 - r).max(0)..=(x as i64 + r).min(w as i64 - 1) {
                        let v = l[yy as usize * w + xx as usize];
                        if v < best.0 {
                            best = (v, xx as usize, yy as usize);
                        }
                    }
                }
                if (best.1, best.2) != (x, y) {
                    let src = img.index(best.1, best.2);
                    let dst = out.index(x, y);
                    let px: Vec<u8> = img.samples()[src..src + c].to_vec();
                    out.samples_mut()[dst..dst + c].copy_from_slice(&px);
                }
            }
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { intensity: Sampled::Fixed(0.0), ..Self::default() })
    }
}

/// Uneven press contact: blob-shaped regions of ink are lightened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Letterpress {
    pub blob_clusters: Sampled<u32>,
    pub blob_points: Sampled<u32>,
    pub blob_spread: f64,
    pub lighten_max: Sampled<f64>,
}

impl Default for Letterpress {
    fn default() -> Self {
        Self {
            blob_clusters: Sampled::Range([4, 8]),
            blob_points: Sampled::Range([300, 600]),
            blob_spread: 10.0,
            lighten_max: Sampled::Range([0.3, 0.6]),
        }
    }
}

impl EffectParams for Letterpress {
    const KIND: &'static str = "letterpress";
    const FAMILY: Family = Family::Ink;

    fn validate(&self) -> Result<()> {
        self.blob_clusters.check(Self::KIND, "blob_clusters", 1, 10_000)?;
        self.blob_points.check(Self::KIND, "blob_points", 0, 1_000_000)?;
        if self.blob_spread.is_nan() || self.blob_spread <= 0.0 {
            return Err(Error::param(Self::KIND, "blob_spread", "must be positive"));
        }
        check_unit(Self::KIND, "lighten_max", &self.lighten_max)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self {
            blob_clusters: self.blob_clusters.resolve(rng),
            blob_points: self.blob_points.resolve(rng),
            blob_spread: self.blob_spread,
            lighten_max: self.lighten_max.resolve(rng),
        }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let lighten_max = self.lighten_max.value();
        if lighten_max == 0.0 {
            return Ok(img.clone());
        }
        let (w, h, c) = img.dims();
        let blobs = BlobParams {
            clusters: self.blob_clusters.value(),
            points_per_cluster: self.blob_points.value(),
            spread_sigma: self.blob_spread,
            blur_sigma: 2.0,
            threshold: 8,
        };
        let mask = make_blob_mask(w, h, &blobs, rng)?;
        let ink = ink_mask(img);
        let mut out = img.clone();
        for (i, (&is_ink, &m)) in ink.iter().zip(mask.samples()).enumerate() {
            if is_ink && m < 255 {
                let amount = lighten_max * (255 - m) as f64 / 255.0;
                lighten_toward_white(&mut out.samples_mut()[i * c..(i + 1) * c], amount);
            }
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { lighten_max: Sampled::Fixed(0.0), ..Self::default() })
    }
}
