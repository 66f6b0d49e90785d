//! Effects on the finished page: copier, binding, fax and handling artifacts.

use serde::{Deserialize, Serialize};

use super::{check_unit, multiply_gain, paint, stroke_coverage};
use crate::effect::{EffectParams, Family};
use crate::error::{Error, Result};
use crate::params::Sampled;
use crate::raster::{self, resample, warp_displacement, DisplacementField, Filter, Format, Raster};
use crate::rng::StreamRng;
use crate::synthesis::{blend, ink_mask, make_blob_mask, Anchor, BlendMode, BlobParams, Placement};

/// 4x4 Bayer index matrix. A level `v` renders white where `v > (B + 0.5) * 16`.
pub const BAYER4: [[u8; 4]; 4] = [[0, 8, 2, 10], [12, 4, 14, 6], [3, 11, 1, 9], [15, 7, 13, 5]];

#[inline]
pub(crate) fn bayer_white(v: u8, x: usize, y: usize) -> bool {
    v as f64 > (BAYER4[y % 4][x % 4] as f64 + 0.5) * 16.0
}

/// Dirty copier: a blob mask multiplied into the page, with optional row-gain banding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BadPhotocopy {
    pub mask: BlobParams,
    pub darkness: Sampled<f64>,
    pub banding: bool,
}

impl Default for BadPhotocopy {
    fn default() -> Self {
        Self { mask: BlobParams::default(), darkness: Sampled::Range([0.3, 0.7]), banding: false }
    }
}

impl EffectParams for BadPhotocopy {
    const KIND: &'static str = "bad_photocopy";
    const FAMILY: Family = Family::Post;

    fn validate(&self) -> Result<()> {
        self.mask.validate(Self::KIND)?;
        check_unit(Self::KIND, "darkness", &self.darkness)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { darkness: self.darkness.resolve(rng), ..self.clone() }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let d = self.darkness.value();
        if d == 0.0 {
            return Ok(img.clone());
        }
        let (w, h, _) = img.dims();
        let mask = make_blob_mask(w, h, &self.mask, rng)?;
        let rows: Vec<f64> = (0..h)
            .map(|_| if self.banding && rng.coin(0.08) { 1.0 - d * 0.25 * rng.uniform() } else { 1.0 })
            .collect();
        let m = mask.samples();
        Ok(multiply_gain(img, |i| (1.0 - d * (255 - m[i]) as f64 / 255.0) * rows[i / w]))
    }

    fn identity() -> Option<Self> {
        Some(Self { darkness: Sampled::Fixed(0.0), ..Self::default() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Fastener {
    #[default]
    PunchHoles,
    Staples,
    Clips,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    #[default]
    Left,
    Right,
    Top,
    Bottom,
}

impl Edge {
    fn anchor(self) -> Anchor {
        match self {
            Edge::Left => Anchor::LeftEdge,
            Edge::Right => Anchor::RightEdge,
            Edge::Top => Anchor::TopEdge,
            Edge::Bottom => Anchor::BottomEdge,
        }
    }

    fn vertical(self) -> bool {
        matches!(self, Edge::Left | Edge::Right)
    }
}

/// Punch holes, staples or clips tiled along one edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BindingsAndFasteners {
    pub artifact: Fastener,
    pub edge: Edge,
    pub count: Sampled<u32>,
    /// Sprite length along the edge; capped at a quarter of the shorter page side.
    pub size: Sampled<u32>,
}

impl Default for BindingsAndFasteners {
    fn default() -> Self {
        Self { artifact: Fastener::PunchHoles, edge: Edge::Left, count: Sampled::Range([2, 3]), size: Sampled::Range([14, 24]) }
    }
}

impl BindingsAndFasteners {
    /// Sprite drawn for an edge running vertically; transposed for horizontal edges.
    fn sprite(&self, s: usize) -> Raster {
        match self.artifact {
            Fastener::PunchHoles => {
                let c = (s as f64 - 1.0) / 2.0;
                let r = s as f64 / 2.0;
                Raster::from_fn_gray(s, s, |x, y| {
                    let (dx, dy) = (x as f64 - c, y as f64 - c);
                    if dx * dx + dy * dy <= r * r { 30 } else { 255 }
                })
            }
            Fastener::Staples => Raster::filled((s / 8).max(2), s, 1, 70),
            Fastener::Clips => {
                let depth = (s / 2).max(3);
                let t = (s / 10).max(1);
                Raster::from_fn_gray(depth, s, |x, y| {
                    if x < t || y < t || y >= s - t { 90 } else { 255 }
                })
            }
        }
    }

    fn oriented_sprite(&self, s: usize) -> Raster {
        let sprite = self.sprite(s);
        if self.edge.vertical() {
            sprite
        } else {
            let (w, h, _) = sprite.dims();
            Raster::from_fn_gray(h, w, |x, y| sprite.pixel(y, x)[0])
        }
    }
}

impl EffectParams for BindingsAndFasteners {
    const KIND: &'static str = "bindings_and_fasteners";
    const FAMILY: Family = Family::Post;

    fn validate(&self) -> Result<()> {
        self.count.check(Self::KIND, "count", 0, 32)?;
        self.size.check(Self::KIND, "size", 1, 1024)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { count: self.count.resolve(rng), size: self.size.resolve(rng), ..self.clone() }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let n = self.count.value() as usize;
        let s = (self.size.value() as usize).min(img.width().min(img.height()) / 4);
        if n == 0 || s < 2 {
            return Ok(img.clone());
        }
        let sprite = self.oriented_sprite(s);
        let placement = Placement { anchor: self.edge.anchor(), edge_offset: s / 2, tile_count: n };
        let out = blend(&sprite, img, BlendMode::Darken, &placement, rng)?;
        Ok(out.with_channels(img.channels()))
    }

    fn identity() -> Option<Self> {
        Some(Self { count: Sampled::Fixed(0), ..Self::default() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Left,
    Right,
}

/// Page curvature and shadow near a book spine.
///
/// Within `bend_radius` of the spine, the distance `d` maps to a circular-arc profile
/// `c(d) = 1 - sqrt(1 - ((R - d) / R)^2)`. Rows are displaced vertically by `A c t / 2` and pulled
/// toward the spine by `A c t^2`, where `t` runs from -1 at the top to 1 at the bottom and
/// `A = R / 4`. The shadow gain rises linearly from 0.4 at the spine to 1 at `shadow_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BookBinding {
    pub bend_radius: Sampled<u32>,
    pub shadow_width: Sampled<u32>,
    pub side: Side,
}

impl Default for BookBinding {
    fn default() -> Self {
        Self { bend_radius: Sampled::Range([30, 80]), shadow_width: Sampled::Range([20, 60]), side: Side::Left }
    }
}

impl BookBinding {
    pub const SHADOW_FLOOR: f64 = 0.4;

    fn spine_distance(&self, x: usize, w: usize) -> f64 {
        match self.side {
            Side::Left => x as f64,
            Side::Right => (w - 1 - x) as f64,
        }
    }
}

impl EffectParams for BookBinding {
    const KIND: &'static str = "book_binding";
    const FAMILY: Family = Family::Post;

    fn validate(&self) -> Result<()> {
        self.bend_radius.check(Self::KIND, "bend_radius", 0, 1 << 16)?;
        self.shadow_width.check(Self::KIND, "shadow_width", 0, 1 << 16)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { bend_radius: self.bend_radius.resolve(rng), shadow_width: self.shadow_width.resolve(rng), side: self.side }
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        let (w, h, _) = img.dims();
        let r = (self.bend_radius.value() as usize).min(w) as f64;
        let sw = (self.shadow_width.value() as usize).min(w) as f64;
        let mut out = img.clone();
        if r > 0.0 {
            let a = r / 4.0;
            let sign = if self.side == Side::Left { 1.0 } else { -1.0 };
            let field = DisplacementField::from_fn(w, h, |x, y| {
                let d = self.spine_distance(x, w);
                if d >= r {
                    return (0.0, 0.0);
                }
                let q = (r - d) / r;
                let c = 1.0 - (1.0 - q * q).max(0.0).sqrt();
                let t = if h > 1 { 2.0 * y as f64 / (h - 1) as f64 - 1.0 } else { 0.0 };
                (sign * a * c * t * t, -a * c * t / 2.0)
            });
            out = warp_displacement(&out, &field, [255; 3])?;
        }
        if sw > 0.0 {
            let gains: Vec<f64> = (0..w)
                .map(|x| {
                    let d = self.spine_distance(x, w);
                    if d >= sw { 1.0 } else { Self::SHADOW_FLOOR + (1.0 - Self::SHADOW_FLOOR) * d / sw }
                })
                .collect();
            out = multiply_gain(&out, |i| gains[i % w]);
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { bend_radius: Sampled::Fixed(0), shadow_width: Sampled::Fixed(0), side: Side::Left })
    }
}

/// Vertical paper folds: tent-shaped horizontal displacement plus a shaded seam per fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Folding {
    pub fold_count: Sampled<u32>,
    pub max_displacement: Sampled<f64>,
    pub seam_width: Sampled<u32>,
    pub seam_delta: Sampled<i32>,
}

impl Default for Folding {
    fn default() -> Self {
        Self {
            fold_count: Sampled::Range([1, 3]),
            max_displacement: Sampled::Range([1.5, 4.0]),
            seam_width: Sampled::Range([2, 6]),
            seam_delta: Sampled::Range([-40, -10]),
        }
    }
}

impl Folding {
    /// Fold columns, one per stratum of the central 80% of the width.
    pub fn fold_positions(n: usize, w: usize, rng: &mut StreamRng) -> Vec<(f64, f64)> {
        let len = 0.8 * w as f64 / n as f64;
        (0..n)
            .map(|k| {
                let pos = 0.1 * w as f64 + len * (k as f64 + 0.25 + 0.5 * rng.uniform());
                let sign = if rng.coin(0.5) { 1.0 } else { -1.0 };
                (pos, sign)
            })
            .collect()
    }
}

impl EffectParams for Folding {
    const KIND: &'static str = "folding";
    const FAMILY: Family = Family::Post;

    fn validate(&self) -> Result<()> {
        self.fold_count.check(Self::KIND, "fold_count", 0, 32)?;
        self.max_displacement.check(Self::KIND, "max_displacement", 0.0, 256.0)?;
        self.seam_width.check(Self::KIND, "seam_width", 0, 256)?;
        self.seam_delta.check(Self::KIND, "seam_delta", -64, 64)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self {
            fold_count: self.fold_count.resolve(rng),
            max_displacement: self.max_displacement.resolve(rng),
            seam_width: self.seam_width.resolve(rng),
            seam_delta: self.seam_delta.resolve(rng),
        }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let n = self.fold_count.value() as usize;
        if n == 0 {
            return Ok(img.clone());
        }
        let (w, h, c) = img.dims();
        let folds = Self::fold_positions(n, w, rng);
        let half = 0.4 * w as f64 / n as f64;
        let d = self.max_displacement.value();
        let mut out = img.clone();
        if d > 0.0 {
            let dx: Vec<f64> = (0..w)
                .map(|x| {
                    let v: f64 = folds.iter().map(|&(p, s)| s * d * (1.0 - (x as f64 - p).abs() / half).max(0.0)).sum();
                    v.clamp(-d, d).clamp(-(x as f64), (w - 1 - x) as f64)
                })
                .collect();
            let field = DisplacementField::from_fn(w, h, |x, _| (dx[x], 0.0));
            out = warp_displacement(&out, &field, [255; 3])?;
        }
        let sw = self.seam_width.value() as usize;
        let delta = self.seam_delta.value();
        if sw > 0 && delta != 0 {
            let mut seam = vec![false; w];
            for &(p, _) in &folds {
                let start = (p - sw as f64 / 2.0).round().max(0.0) as usize;
                for flag in seam.iter_mut().skip(start).take(sw) {
                    *flag = true;
                }
            }
            for (i, v) in out.samples_mut().iter_mut().enumerate() {
                if seam[(i / c) % w] {
                    *v = (*v as i32 + delta).clamp(0, 255) as u8;
                }
            }
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { fold_count: Sampled::Fixed(0), ..Self::default() })
    }
}

/// Lossy compression round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Jpeg {
    pub quality: Sampled<u8>,
}

impl Default for Jpeg {
    fn default() -> Self {
        Self { quality: Sampled::Range([30, 90]) }
    }
}

impl EffectParams for Jpeg {
    const KIND: &'static str = "jpeg";
    const FAMILY: Family = Family::Post;

    fn validate(&self) -> Result<()> {
        self.quality.check(Self::KIND, "quality", 1, 100)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { quality: self.quality.resolve(rng) }
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        let bytes = raster::encode(img, Format::Jpeg { quality: self.quality.value() })?;
        raster::decode(&bytes)
    }

    fn identity() -> Option<Self> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MarkStyle {
    #[default]
    Underline,
    Strikethrough,
    Highlight,
}

/// Bounding box of one detected text line, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextLine {
    pub top: usize,
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
}

/// Text lines from the ink mask's horizontal projection. A row is text when its ink count
/// exceeds 2% of the width; three or more blank rows separate lines.
pub fn text_lines(img: &Raster) -> Vec<TextLine> {
    let (w, h, _) = img.dims();
    let mask = ink_mask(img);
    let mut lines: Vec<TextLine> = Vec::new();
    let mut last_text: Option<usize> = None;
    for y in 0..h {
        let row = &mask[y * w..(y + 1) * w];
        if row.iter().filter(|&&m| m).count() * 50 <= w {
            continue;
        }
        let left = row.iter().position(|&m| m).unwrap_or(0);
        let right = row.iter().rposition(|&m| m).unwrap_or(0);
        match (lines.last_mut(), last_text) {
            (Some(line), Some(prev)) if y - prev < 4 => {
                line.bottom = y;
                line.left = line.left.min(left);
                line.right = line.right.max(right);
            }
            _ => lines.push(TextLine { top: y, bottom: y, left, right }),
        }
        last_text = Some(y);
    }
    lines
}

/// Pen and highlighter marks on detected text lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Markup {
    pub style: MarkStyle,
    pub color: [u8; 3],
    pub thickness: Sampled<u32>,
    pub line_prob: Sampled<f64>,
}

impl Default for Markup {
    fn default() -> Self {
        Self {
            style: MarkStyle::Underline,
            color: [30, 60, 190],
            thickness: Sampled::Range([1, 3]),
            line_prob: Sampled::Range([0.3, 0.7]),
        }
    }
}

impl EffectParams for Markup {
    const KIND: &'static str = "markup";
    const FAMILY: Family = Family::Post;

    fn validate(&self) -> Result<()> {
        self.thickness.check(Self::KIND, "thickness", 1, 64)?;
        check_unit(Self::KIND, "line_prob", &self.line_prob)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { thickness: self.thickness.resolve(rng), line_prob: self.line_prob.resolve(rng), ..self.clone() }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let prob = self.line_prob.value();
        if prob == 0.0 {
            return Ok(img.clone());
        }
        let (w, h, _) = img.dims();
        let t = self.thickness.value() as f64;
        let mut cov = vec![false; w * h];
        for line in text_lines(img) {
            if !rng.coin(prob) {
                continue;
            }
            let strokes = match self.style {
                MarkStyle::Highlight => {
                    let (y0, y1) = (line.top.saturating_sub(1), (line.bottom + 1).min(h - 1));
                    let (x0, x1) = (line.left.saturating_sub(2), (line.right + 2).min(w - 1));
                    for y in y0..=y1 {
                        cov[y * w + x0..=y * w + x1].iter_mut().for_each(|c| *c = true);
                    }
                    continue;
                }
                MarkStyle::Underline => (line.bottom as f64 + 1.0 + t / 2.0).min((h - 1) as f64),
                MarkStyle::Strikethrough => (line.top + line.bottom) as f64 / 2.0,
            };
            let mut pts = Vec::new();
            let mut x = line.left as f64;
            loop {
                let jitter = rng.normal(0.0, 0.6).clamp(-1.5, 1.5);
                pts.push((x.min(line.right as f64), strokes + jitter));
                if x >= line.right as f64 {
                    break;
                }
                x += 12.0;
            }
            for (c, s) in cov.iter_mut().zip(stroke_coverage(w, h, &pts, t)) {
                *c |= s;
            }
        }
        if !cov.iter().any(|&c| c) {
            return Ok(img.clone());
        }
        let mode = if self.style == MarkStyle::Highlight { BlendMode::Multiply } else { BlendMode::Darken };
        Ok(paint(img, &cov, self.color, mode))
    }

    fn identity() -> Option<Self> {
        Some(Self { line_prob: Sampled::Fixed(0.0), ..Self::default() })
    }
}

/// Fax transmission: downscale, binarize or halftone, upscale with nearest neighbour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Faxify {
    pub target_scale: Sampled<f64>,
    pub halftone: bool,
    /// Luma at or above which a pixel is white when `halftone` is off.
    pub threshold: Sampled<u8>,
}

impl Default for Faxify {
    fn default() -> Self {
        Self { target_scale: Sampled::Range([0.5, 0.8]), halftone: true, threshold: Sampled::Fixed(128) }
    }
}

impl EffectParams for Faxify {
    const KIND: &'static str = "faxify";
    const FAMILY: Family = Family::Post;

    fn validate(&self) -> Result<()> {
        self.target_scale.check(Self::KIND, "target_scale", 1e-3, 1.0)?;
        self.threshold.check(Self::KIND, "threshold", 0, 255)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { target_scale: self.target_scale.resolve(rng), threshold: self.threshold.resolve(rng), ..self.clone() }
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        let (w, h, c) = img.dims();
        let s = self.target_scale.value();
        let sw = ((w as f64 * s).round() as usize).max(1);
        let sh = ((h as f64 * s).round() as usize).max(1);
        let small = resample(&img.to_gray(), sw, sh, Filter::Bilinear)?;
        let t = self.threshold.value();
        let binary = Raster::from_fn_gray(sw, sh, |x, y| {
            let v = small.pixel(x, y)[0];
            let white = if self.halftone { bayer_white(v, x, y) } else { v >= t };
            if white { 255 } else { 0 }
        });
        Ok(resample(&binary, w, h, Filter::Nearest)?.with_channels(c))
    }

    fn identity() -> Option<Self> {
        None
    }
}

/// Dark margin around the page, with an optionally ragged inner boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageBorder {
    /// Top, right, bottom, left.
    pub widths: [Sampled<u32>; 4],
    pub color: [u8; 3],
    pub ragged: bool,
}

impl Default for PageBorder {
    fn default() -> Self {
        Self { widths: [Sampled::Range([4, 16]); 4], color: [20, 20, 20], ragged: true }
    }
}

impl PageBorder {
    pub const RAGGEDNESS: i64 = 3;

    /// Boundary offsets in `[-3, 3]` along a side: linear interpolation of a 16 px lattice.
    fn profile(len: usize, ragged: bool, rng: &mut StreamRng) -> Vec<i64> {
        if !ragged {
            return vec![0; len];
        }
        const STEP: usize = 16;
        let r = Self::RAGGEDNESS as f64;
        let knots: Vec<f64> = (0..len / STEP + 2).map(|_| rng.range_f64(-r, r)).collect();
        (0..len)
            .map(|i| {
                let (k, f) = (i / STEP, (i % STEP) as f64 / STEP as f64);
                (knots[k] * (1.0 - f) + knots[k + 1] * f).round().clamp(-r, r) as i64
            })
            .collect()
    }
}

impl EffectParams for PageBorder {
    const KIND: &'static str = "page_border";
    const FAMILY: Family = Family::Post;

    fn validate(&self) -> Result<()> {
        for (i, wd) in self.widths.iter().enumerate() {
            wd.check(Self::KIND, &format!("widths[{i}]"), 0, 4096)?;
        }
        Ok(())
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { widths: self.widths.map(|v| v.resolve(rng)), ..self.clone() }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let [t, r, b, l] = self.widths.map(|v| v.value() as usize);
        if t + r + b + l == 0 {
            return Ok(img.clone());
        }
        let gray = self.color[0] == self.color[1] && self.color[1] == self.color[2];
        let src = if gray { img.clone() } else { img.to_rgb() };
        let (w, h, c) = src.dims();
        let (ow, oh) = (w + l + r, h + t + b);
        let top = Self::profile(ow, self.ragged, rng);
        let right = Self::profile(oh, self.ragged, rng);
        let bottom = Self::profile(ow, self.ragged, rng);
        let left = Self::profile(oh, self.ragged, rng);
        let (ti, ri, bi, li) = (t as i64, r as i64, b as i64, l as i64);
        let (owi, ohi) = (ow as i64, oh as i64);
        let mut out = vec![0u8; ow * oh * c];
        for y in 0..oh {
            let sy = (y as i64 - ti).clamp(0, h as i64 - 1) as usize;
            for x in 0..ow {
                let (xi, yi) = (x as i64, y as i64);
                let border = (t > 0 && yi < ti + top[x])
                    || (b > 0 && yi >= ohi - bi - bottom[x])
                    || (l > 0 && xi < li + left[y])
                    || (r > 0 && xi >= owi - ri - right[y]);
                let o = (y * ow + x) * c;
                if border {
                    if c == 1 {
                        out[o] = self.color[0];
                    } else {
                        out[o..o + 3].copy_from_slice(&self.color);
                    }
                } else {
                    let sx = (xi - li).clamp(0, w as i64 - 1) as usize;
                    out[o..o + c].copy_from_slice(src.pixel(sx, sy));
                }
            }
        }
        Raster::new(ow, oh, c, out).map_err(|e| Error::param(Self::KIND, "widths", e.to_string()))
    }

    fn identity() -> Option<Self> {
        Some(Self { widths: [Sampled::Fixed(0); 4], ..Self::default() })
    }
}
