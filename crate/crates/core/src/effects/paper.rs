//! Effects on the paper substrate, applied to the sheet before the ink is printed onto it.

use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::{check_unit, multiply_gain};
use crate::effect::{EffectParams, Family};
use crate::error::{Error, Result};
use crate::raster::{self, clamp_u8, hsv_to_rgb_f, rgb_to_hsv_f, warp_affine_to, Affine, Filter, Raster};
use crate::rng::StreamRng;
use crate::params::Sampled;
use crate::synthesis::{blend_at, ink_mask, BlendMode, Placement};

/// Tints the background: hue and saturation replaced in HSV, value kept. Ink is untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColorPaper {
    /// Packed hue 0..=255 (scaled from degrees); `null` keeps the original hue.
    pub hue: Option<Sampled<u8>>,
    /// 0..=255; `null` keeps the original saturation.
    pub saturation: Option<Sampled<u8>>,
}

impl Default for ColorPaper {
    fn default() -> Self {
        Self { hue: Some(Sampled::Range([20, 50])), saturation: Some(Sampled::Range([10, 40])) }
    }
}

impl EffectParams for ColorPaper {
    const KIND: &'static str = "color_paper";
    const FAMILY: Family = Family::Paper;

    fn validate(&self) -> Result<()> {
        if let Some(h) = &self.hue {
            h.check(Self::KIND, "hue", 0, 255)?;
        }
        if let Some(s) = &self.saturation {
            s.check(Self::KIND, "saturation", 0, 255)?;
        }
        Ok(())
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { hue: self.hue.map(|h| h.resolve(rng)), saturation: self.saturation.map(|s| s.resolve(rng)) }
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        if self.hue.is_none() && self.saturation.is_none() {
            return Ok(img.clone());
        }
        let ink = ink_mask(img);
        if ink.iter().all(|&i| i) {
            return Ok(img.clone());
        }
        let hue = self.hue.map(|h| raster::color::hue_from_u8(h.value()));
        let sat = self.saturation.map(|s| s.value() as f64 / 255.0);
        let mut out = img.to_rgb();
        for (px, &is_ink) in out.samples_mut().chunks_exact_mut(3).zip(&ink) {
            if is_ink {
                continue;
            }
            let (h0, s0, v) = rgb_to_hsv_f(px[0] as f64, px[1] as f64, px[2] as f64);
            let (r, g, b) = hsv_to_rgb_f(hue.unwrap_or(h0), sat.unwrap_or(s0), v);
            px.copy_from_slice(&[clamp_u8(r), clamp_u8(g), clamp_u8(b)]);
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { hue: None, saturation: None })
    }
}

/// A faint stamp pressed into the paper. Pure-white stamp pixels are transparent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Watermark {
    /// PNG/JPEG stamp; the built-in diagonal stripes when absent.
    pub stamp: Option<PathBuf>,
    pub opacity: Sampled<f64>,
    pub rotation_deg: Sampled<f64>,
    pub placement: Placement,
    #[serde(skip)]
    loaded: Option<Arc<Raster>>,
}

impl Default for Watermark {
    fn default() -> Self {
        Self {
            stamp: None,
            opacity: Sampled::Range([0.15, 0.35]),
            rotation_deg: Sampled::Range([-45.0, 45.0]),
            placement: Placement::default(),
            loaded: None,
        }
    }
}

impl Watermark {
    pub fn with_stamp(stamp: Raster) -> Self {
        Self { loaded: Some(Arc::new(stamp)), ..Self::default() }
    }

    fn stamp_raster(&self) -> Arc<Raster> {
        self.loaded.clone().unwrap_or_else(default_stamp)
    }
}

static STRIPES_PNG: &[u8] = include_bytes!("../../assets/watermark_stripes.png");

/// The built-in watermark asset.
pub fn default_stamp() -> Arc<Raster> {
    static STAMP: OnceLock<Arc<Raster>> = OnceLock::new();
    STAMP.get_or_init(|| Arc::new(raster::decode(STRIPES_PNG).expect("bundled stamp decodes"))).clone()
}

/// Procedural source of the bundled stamp: 96x96 diagonal stripes.
pub fn stripes_stamp() -> Raster {
    Raster::from_fn_gray(96, 96, |x, y| if ((x + y) / 8) % 2 == 0 { 140 } else { 255 })
}

impl EffectParams for Watermark {
    const KIND: &'static str = "watermark";
    const FAMILY: Family = Family::Paper;

    fn validate(&self) -> Result<()> {
        check_unit(Self::KIND, "opacity", &self.opacity)?;
        self.rotation_deg.check(Self::KIND, "rotation_deg", -360.0, 360.0)
    }

    fn prepare(&mut self) -> Result<()> {
        self.validate()?;
        if let Some(path) = &self.stamp {
            let bytes = std::fs::read(path).map_err(|e| Error::param(Self::KIND, "stamp", format!("{}: {e}", path.display())))?;
            self.loaded = Some(Arc::new(raster::decode(&bytes)?));
        }
        Ok(())
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { opacity: self.opacity.resolve(rng), rotation_deg: self.rotation_deg.resolve(rng), ..self.clone() }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let opacity = self.opacity.value();
        if opacity == 0.0 {
            return Ok(img.clone());
        }
        let (w, h, _) = img.dims();
        let mut stamp = (*self.stamp_raster()).clone();
        let limit = (w.min(h) as f64 * 0.8).max(1.0);
        let longest = stamp.width().max(stamp.height()) as f64;
        if longest > limit {
            let k = limit / longest;
            let nw = ((stamp.width() as f64 * k).round() as usize).max(1);
            let nh = ((stamp.height() as f64 * k).round() as usize).max(1);
            stamp = raster::resample(&stamp, nw, nh, Filter::Bilinear)?;
        }
        let deg = self.rotation_deg.value();
        if deg != 0.0 {
            let (sw, sh) = (stamp.width() as f64, stamp.height() as f64);
            let (s, c) = deg.to_radians().sin_cos();
            let bw = ((sw * c.abs() + sh * s.abs()).ceil() as usize).clamp(1, w);
            let bh = ((sw * s.abs() + sh * c.abs()).ceil() as usize).clamp(1, h);
            let rot = Affine::rotation_about(deg, (sw - 1.0) / 2.0, (sh - 1.0) / 2.0)
                .then(&Affine::translation((bw as f64 - sw) / 2.0, (bh as f64 - sh) / 2.0));
            stamp = warp_affine_to(&stamp, &rot, [255; 3], bw, bh);
        }
        let positions = self.placement.positions((stamp.width(), stamp.height()), (w, h), rng)?;
        let c = img.channels().max(stamp.channels());
        let stamp = stamp.with_channels(c);
        let mut layer = img.with_channels(c);
        let original = layer.clone();
        for (px, py) in positions {
            blend_at(&stamp, &mut layer, BlendMode::Normal { alpha: opacity }, px, py);
            // White stamp pixels are transparent.
            for y in 0..stamp.height() {
                for x in 0..stamp.width() {
                    if stamp.pixel(x, y).iter().all(|&v| v == 255) {
                        let i = layer.index(px + x, py + y);
                        let src = original.samples()[i..i + c].to_vec();
                        layer.samples_mut()[i..i + c].copy_from_slice(&src);
                    }
                }
            }
        }
        let ink = ink_mask(img);
        let mut changed = false;
        for (i, &is_ink) in ink.iter().enumerate() {
            let range = i * c..(i + 1) * c;
            if is_ink {
                let src = original.samples()[range.clone()].to_vec();
                layer.samples_mut()[range].copy_from_slice(&src);
            } else if layer.samples()[range.clone()] != original.samples()[range] {
                changed = true;
            }
        }
        Ok(if changed { layer } else { img.clone() })
    }

    fn identity() -> Option<Self> {
        Some(Self { opacity: Sampled::Fixed(0.0), ..Self::default() })
    }
}

/// Power-law tone curve `255 * (v / 255)^gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Gamma {
    pub gamma: Sampled<f64>,
}

impl Default for Gamma {
    fn default() -> Self {
        Self { gamma: Sampled::Range([0.7, 1.5]) }
    }
}

impl Gamma {
    pub fn lut(gamma: f64) -> [u8; 256] {
        let mut lut = [0u8; 256];
        for (v, out) in lut.iter_mut().enumerate() {
            *out = clamp_u8(255.0 * (v as f64 / 255.0).powf(gamma));
        }
        lut
    }
}

impl EffectParams for Gamma {
    const KIND: &'static str = "gamma";
    const FAMILY: Family = Family::Paper;

    fn validate(&self) -> Result<()> {
        self.gamma.check(Self::KIND, "gamma", f64::MIN_POSITIVE, 100.0)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { gamma: self.gamma.resolve(rng) }
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        let g = self.gamma.value();
        if g == 1.0 {
            return Ok(img.clone());
        }
        Ok(img.map_lut(&Self::lut(g)))
    }

    fn identity() -> Option<Self> {
        Some(Self { gamma: Sampled::Fixed(1.0) })
    }
}

/// Uneven illumination: a linear gain ramp from `max_gain` at the centre to `min_gain` at the far
/// edge along `direction_deg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LightingGradient {
    /// Ramp origin as fractions of width and height.
    pub center: [Sampled<f64>; 2],
    pub direction_deg: Sampled<f64>,
    pub max_gain: Sampled<f64>,
    pub min_gain: Sampled<f64>,
}

impl Default for LightingGradient {
    fn default() -> Self {
        Self {
            center: [Sampled::Range([0.3, 0.7]), Sampled::Range([0.3, 0.7])],
            direction_deg: Sampled::Range([0.0, 360.0]),
            max_gain: Sampled::Range([1.0, 1.15]),
            min_gain: Sampled::Range([0.6, 0.9]),
        }
    }
}

impl LightingGradient {
    /// Gain for every pixel in raster order.
    pub fn gain_field(&self, w: usize, h: usize) -> Vec<f64> {
        let cx = self.center[0].value() * (w - 1) as f64;
        let cy = self.center[1].value() * (h - 1) as f64;
        let (s, c) = self.direction_deg.value().to_radians().sin_cos();
        let proj = |x: f64, y: f64| (x - cx) * c + (y - cy) * s;
        let reach = [(0.0, 0.0), ((w - 1) as f64, 0.0), (0.0, (h - 1) as f64), ((w - 1) as f64, (h - 1) as f64)]
            .iter()
            .map(|&(x, y)| proj(x, y))
            .fold(0.0f64, f64::max);
        let (hi, lo) = (self.max_gain.value(), self.min_gain.value());
        let mut gains = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let t = if reach > 0.0 { (proj(x as f64, y as f64) / reach).clamp(0.0, 1.0) } else { 0.0 };
                gains.push(hi + (lo - hi) * t);
            }
        }
        gains
    }
}

impl EffectParams for LightingGradient {
    const KIND: &'static str = "lighting_gradient";
    const FAMILY: Family = Family::Paper;

    fn validate(&self) -> Result<()> {
        check_unit(Self::KIND, "center[0]", &self.center[0])?;
        check_unit(Self::KIND, "center[1]", &self.center[1])?;
        self.direction_deg.check(Self::KIND, "direction_deg", -360.0, 720.0)?;
        self.max_gain.check(Self::KIND, "max_gain", 1.0, 4.0)?;
        check_unit(Self::KIND, "min_gain", &self.min_gain)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self {
            center: [self.center[0].resolve(rng), self.center[1].resolve(rng)],
            direction_deg: self.direction_deg.resolve(rng),
            max_gain: self.max_gain.resolve(rng),
            min_gain: self.min_gain.resolve(rng),
        }
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        if self.max_gain.value() == 1.0 && self.min_gain.value() == 1.0 {
            return Ok(img.clone());
        }
        let gains = self.gain_field(img.width(), img.height());
        Ok(multiply_gain(img, |i| gains[i]))
    }

    fn identity() -> Option<Self> {
        Some(Self { max_gain: Sampled::Fixed(1.0), min_gain: Sampled::Fixed(1.0), ..Self::default() })
    }
}

/// Independent uniform integer noise in `[-range, range]` per pixel (shared across channels).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubtleNoise {
    pub range: Sampled<u32>,
}

impl Default for SubtleNoise {
    fn default() -> Self {
        Self { range: Sampled::Range([3, 8]) }
    }
}

impl EffectParams for SubtleNoise {
    const KIND: &'static str = "subtle_noise";
    const FAMILY: Family = Family::Paper;

    fn validate(&self) -> Result<()> {
        self.range.check(Self::KIND, "range", 0, 255)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { range: self.range.resolve(rng) }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let r = self.range.value() as i64;
        if r == 0 {
            return Ok(img.clone());
        }
        let c = img.channels();
        let mut out = img.clone();
        for px in out.samples_mut().chunks_exact_mut(c) {
            let n = rng.range_i64(-r, r);
            for v in px {
                *v = (*v as i64 + n).clamp(0, 255) as u8;
            }
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { range: Sampled::Fixed(0) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CropMode {
    #[default]
    RandomCrop,
    ScaleToFit,
}

/// Replaces the sheet with a texture picked from a directory of paper scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PaperFactory {
    pub texture_dir: Option<PathBuf>,
    pub crop_mode: CropMode,
}

/// Texture files in `dir`, sorted by file name.
pub fn list_textures(dir: &Path) -> Result<Vec<PathBuf>> {
    let read = std::fs::read_dir(dir).map_err(|e| Error::Texture { path: dir.to_path_buf(), reason: e.to_string() })?;
    let mut files: Vec<PathBuf> = read
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
                .unwrap_or(false)
        })
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if files.is_empty() {
        return Err(Error::Texture { path: dir.to_path_buf(), reason: "no PNG or JPEG textures".into() });
    }
    Ok(files)
}

impl PaperFactory {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { texture_dir: Some(dir.into()), crop_mode: CropMode::default() }
    }
}

impl EffectParams for PaperFactory {
    const KIND: &'static str = "paper_factory";
    const FAMILY: Family = Family::Paper;

    fn validate(&self) -> Result<()> {
        if self.texture_dir.is_none() {
            return Err(Error::Config("paper_factory requires a texture directory".into()));
        }
        Ok(())
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let dir = self.texture_dir.as_deref().ok_or_else(|| Error::Config("paper_factory requires a texture directory".into()))?;
        let files = list_textures(dir)?;
        let path = &files[rng.index(files.len())];
        let bytes = std::fs::read(path).map_err(|e| Error::Texture { path: path.clone(), reason: e.to_string() })?;
        let texture = raster::decode(&bytes).map_err(|e| Error::Texture { path: path.clone(), reason: e.to_string() })?;
        let (w, h, _) = img.dims();
        let fits = texture.width() >= w && texture.height() >= h;
        if self.crop_mode == CropMode::RandomCrop && fits {
            let x = rng.range_i64(0, (texture.width() - w) as i64) as usize;
            let y = rng.range_i64(0, (texture.height() - h) as i64) as usize;
            texture.crop(x, y, w, h)
        } else {
            raster::resample(&texture, w, h, Filter::Bilinear)
        }
    }

    fn identity() -> Option<Self> {
        None
    }
}
