//! Effects that fit more than one phase.

use serde::{Deserialize, Serialize};

use super::post::bayer_white;
use super::{check_unit, multiply_gain, paint, stroke_coverage};
use crate::effect::{EffectParams, Family};
use crate::error::{Error, Result};
use crate::params::Sampled;
use crate::raster::{clamp_u8, resample, warp_affine, Affine, Filter, Raster};
use crate::rng::StreamRng;
use crate::synthesis::{value_noise, BlendMode};

/// Per-pixel brightness jitter. Scaling V in HSV keeps hue and saturation, so it reduces to a
/// uniform scale of the RGB triple, capped where V would pass 255.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BrightnessTexturize {
    pub deviation: Sampled<f64>,
    pub passes: u32,
}

impl Default for BrightnessTexturize {
    fn default() -> Self {
        Self { deviation: Sampled::Range([0.05, 0.15]), passes: 1 }
    }
}

impl EffectParams for BrightnessTexturize {
    const KIND: &'static str = "brightness_texturize";
    const FAMILY: Family = Family::Multiple;

    fn validate(&self) -> Result<()> {
        self.deviation.check(Self::KIND, "deviation", 0.0, 0.5)?;
        if !(1..=3).contains(&self.passes) {
            return Err(Error::param(Self::KIND, "passes", "must lie in [1, 3]"));
        }
        Ok(())
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { deviation: self.deviation.resolve(rng), passes: self.passes }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let dev = self.deviation.value();
        if dev == 0.0 {
            return Ok(img.clone());
        }
        let c = img.channels();
        let mut out = img.clone();
        for _ in 0..self.passes {
            for px in out.samples_mut().chunks_exact_mut(c) {
                let u = rng.range_f64(-dev, dev);
                let v = *px.iter().max().expect("non-empty pixel") as f64;
                if v == 0.0 {
                    continue;
                }
                let f = (v * (1.0 + u)).min(255.0) / v;
                for s in px.iter_mut() {
                    *s = clamp_u8(*s as f64 * f);
                }
            }
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { deviation: Sampled::Fixed(0.0), passes: 1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    H,
    #[default]
    V,
}

/// Laser-drum banding: fixed-width bands, each with its own gain. `v` bands are columns, `h` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirtyDrum {
    pub direction: Direction,
    pub band_width: Sampled<u32>,
    pub intensity: Sampled<f64>,
}

impl Default for DirtyDrum {
    fn default() -> Self {
        Self { direction: Direction::V, band_width: Sampled::Range([6, 20]), intensity: Sampled::Range([0.05, 0.2]) }
    }
}

impl EffectParams for DirtyDrum {
    const KIND: &'static str = "dirty_drum";
    const FAMILY: Family = Family::Multiple;

    fn validate(&self) -> Result<()> {
        self.band_width.check(Self::KIND, "band_width", 1, 1 << 16)?;
        check_unit(Self::KIND, "intensity", &self.intensity)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { band_width: self.band_width.resolve(rng), intensity: self.intensity.resolve(rng), direction: self.direction }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let k = self.intensity.value();
        if k == 0.0 {
            return Ok(img.clone());
        }
        let (w, h, _) = img.dims();
        let bw = self.band_width.value() as usize;
        let span = if self.direction == Direction::V { w } else { h };
        let gains: Vec<f64> = (0..span.div_ceil(bw)).map(|_| rng.range_f64(1.0 - k, 1.0 + k)).collect();
        Ok(match self.direction {
            Direction::V => multiply_gain(img, |i| gains[(i % w) / bw]),
            Direction::H => multiply_gain(img, |i| gains[(i / w) / bw]),
        })
    }

    fn identity() -> Option<Self> {
        Some(Self { intensity: Sampled::Fixed(0.0), ..Self::default() })
    }
}

/// Roller marks: horizontal bands of random height and gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirtyRollers {
    pub band_width_range: [u32; 2],
    pub gain_range: [f64; 2],
}

impl Default for DirtyRollers {
    fn default() -> Self {
        Self { band_width_range: [4, 24], gain_range: [0.85, 1.1] }
    }
}

impl DirtyRollers {
    /// `(first_row, height, gain)` for each band, top to bottom.
    pub fn bands(&self, h: usize, rng: &mut StreamRng) -> Vec<(usize, usize, f64)> {
        let [lo, hi] = self.band_width_range;
        let [glo, ghi] = self.gain_range;
        let mut out = Vec::new();
        let mut y = 0;
        while y < h {
            let bw = rng.range_i64(lo as i64, hi as i64) as usize;
            out.push((y, bw.min(h - y), rng.range_f64(glo, ghi)));
            y += bw;
        }
        out
    }
}

impl EffectParams for DirtyRollers {
    const KIND: &'static str = "dirty_rollers";
    const FAMILY: Family = Family::Multiple;

    fn validate(&self) -> Result<()> {
        Sampled::Range(self.band_width_range).check(Self::KIND, "band_width_range", 1, 1 << 16)?;
        Sampled::Range(self.gain_range).check(Self::KIND, "gain_range", 0.7, 1.3)
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        if self.gain_range == [1.0, 1.0] {
            return Ok(img.clone());
        }
        let (w, h, _) = img.dims();
        let mut rows = vec![1.0; h];
        for (y, n, g) in self.bands(h, rng) {
            rows[y..y + n].iter_mut().for_each(|r| *r = g);
        }
        Ok(multiply_gain(img, |i| rows[i / w]))
    }

    fn identity() -> Option<Self> {
        Some(Self { gain_range: [1.0, 1.0], ..Self::default() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DitherMode {
    #[default]
    Ordered,
    ErrorDiffusion,
}

/// Binarizes luma by 4x4 Bayer screen or Floyd-Steinberg (left to right, threshold 128).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Dithering {
    pub mode: DitherMode,
}

pub fn floyd_steinberg(gray: &Raster) -> Raster {
    let (w, h, _) = gray.dims();
    let mut buf: Vec<f64> = gray.samples().iter().map(|&v| v as f64).collect();
    let mut out = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let old = buf[i];
            let new = if old >= 128.0 { 255.0 } else { 0.0 };
            out[i] = new as u8;
            let err = old - new;
            if x + 1 < w {
                buf[i + 1] += err * 7.0 / 16.0;
            }
            if y + 1 < h {
                if x > 0 {
                    buf[i + w - 1] += err * 3.0 / 16.0;
                }
                buf[i + w] += err * 5.0 / 16.0;
                if x + 1 < w {
                    buf[i + w + 1] += err / 16.0;
                }
            }
        }
    }
    gray.with_samples(out)
}

impl EffectParams for Dithering {
    const KIND: &'static str = "dithering";
    const FAMILY: Family = Family::Multiple;

    fn validate(&self) -> Result<()> {
        Ok(())
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        let gray = img.to_gray();
        let out = match self.mode {
            DitherMode::Ordered => {
                let w = gray.width();
                let s = gray.samples().iter().enumerate().map(|(i, &v)| if bayer_white(v, i % w, i / w) { 255 } else { 0 }).collect();
                gray.with_samples(s)
            }
            DitherMode::ErrorDiffusion => floyd_steinberg(&gray),
        };
        Ok(out.with_channels(img.channels()))
    }

    fn identity() -> Option<Self> {
        None
    }
}

/// Crop, scale, rotate about the centre, translate, then flip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometric {
    pub scale: Sampled<f64>,
    pub rotate_deg: Sampled<f64>,
    pub translate: [Sampled<i32>; 2],
    pub flip_h: bool,
    pub flip_v: bool,
    /// `[x, y, width, height]`, clipped to the image.
    pub crop: Option<[u32; 4]>,
}

impl Default for Geometric {
    fn default() -> Self {
        Self {
            scale: Sampled::Fixed(1.0),
            rotate_deg: Sampled::Range([-2.0, 2.0]),
            translate: [Sampled::Fixed(0); 2],
            flip_h: false,
            flip_v: false,
            crop: None,
        }
    }
}

impl EffectParams for Geometric {
    const KIND: &'static str = "geometric";
    const FAMILY: Family = Family::Multiple;

    fn validate(&self) -> Result<()> {
        self.scale.check(Self::KIND, "scale", 0.05, 8.0)?;
        self.rotate_deg.check(Self::KIND, "rotate_deg", -360.0, 360.0)?;
        for (i, t) in self.translate.iter().enumerate() {
            t.check(Self::KIND, &format!("translate[{i}]"), -(1 << 16), 1 << 16)?;
        }
        if let Some([_, _, w, h]) = self.crop {
            if w == 0 || h == 0 {
                return Err(Error::param(Self::KIND, "crop", "width and height must be positive"));
            }
        }
        Ok(())
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self {
            scale: self.scale.resolve(rng),
            rotate_deg: self.rotate_deg.resolve(rng),
            translate: self.translate.map(|t| t.resolve(rng)),
            ..self.clone()
        }
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        let mut out = img.clone();
        if let Some([x, y, cw, ch]) = self.crop {
            let (w, h, _) = out.dims();
            let (x, y) = ((x as usize).min(w - 1), (y as usize).min(h - 1));
            let (cw, ch) = ((cw as usize).min(w - x), (ch as usize).min(h - y));
            if (x, y, cw, ch) != (0, 0, w, h) {
                out = out.crop(x, y, cw, ch)?;
            }
        }
        let s = self.scale.value();
        if s != 1.0 {
            let nw = ((out.width() as f64 * s).round() as usize).max(1);
            let nh = ((out.height() as f64 * s).round() as usize).max(1);
            out = resample(&out, nw, nh, Filter::Bilinear)?;
        }
        let deg = self.rotate_deg.value();
        let [tx, ty] = self.translate.map(|t| t.value() as f64);
        if deg != 0.0 || tx != 0.0 || ty != 0.0 {
            let (cx, cy) = ((out.width() - 1) as f64 / 2.0, (out.height() - 1) as f64 / 2.0);
            let m = Affine::rotation_about(deg, cx, cy).then(&Affine::translation(tx, ty));
            out = warp_affine(&out, &m, [255; 3]);
        }
        if self.flip_h {
            out = out.flip_horizontal();
        }
        if self.flip_v {
            out = out.flip_vertical();
        }
        Ok(out)
    }

    fn identity() -> Option<Self> {
        Some(Self { rotate_deg: Sampled::Fixed(0.0), ..Self::default() })
    }
}

/// Smooth multi-octave gain texture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseTexturize {
    pub octaves: u32,
    pub base_scale: Sampled<f64>,
    pub strength: Sampled<f64>,
    pub persistence: f64,
}

impl Default for NoiseTexturize {
    fn default() -> Self {
        Self { octaves: 3, base_scale: Sampled::Range([16.0, 64.0]), strength: Sampled::Range([0.1, 0.3]), persistence: 0.5 }
    }
}

impl EffectParams for NoiseTexturize {
    const KIND: &'static str = "noise_texturize";
    const FAMILY: Family = Family::Multiple;

    fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.octaves) {
            return Err(Error::param(Self::KIND, "octaves", "must lie in [1, 8]"));
        }
        if !(0.0..=1.0).contains(&self.persistence) {
            return Err(Error::param(Self::KIND, "persistence", "must lie in [0, 1]"));
        }
        self.base_scale.check(Self::KIND, "base_scale", 2.0, 1e6)?;
        check_unit(Self::KIND, "strength", &self.strength)
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self { base_scale: self.base_scale.resolve(rng), strength: self.strength.resolve(rng), ..self.clone() }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        let k = self.strength.value();
        if k == 0.0 {
            return Ok(img.clone());
        }
        let (w, h, _) = img.dims();
        let n = value_noise(w, h, self.base_scale.value(), self.octaves, self.persistence, rng)?;
        let n = n.samples();
        Ok(multiply_gain(img, |i| 1.0 + k * (2.0 * n[i] as f64 / 255.0 - 1.0)))
    }

    fn identity() -> Option<Self> {
        Some(Self { strength: Sampled::Fixed(0.0), ..Self::default() })
    }
}

/// Flattens a quadratic Bezier into a polyline whose chords stay within `tol` of the curve.
pub fn flatten_quadratic(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64), tol: f64) -> Vec<(f64, f64)> {
    fn rec(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64), tol: f64, depth: u32, out: &mut Vec<(f64, f64)>) {
        let (ex, ey) = (p0.0 - 2.0 * p1.0 + p2.0, p0.1 - 2.0 * p1.1 + p2.1);
        if depth >= 16 || (ex * ex + ey * ey).sqrt() / 4.0 <= tol {
            out.push(p2);
            return;
        }
        let mid = |a: (f64, f64), b: (f64, f64)| ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        let (a, b) = (mid(p0, p1), mid(p1, p2));
        let m = mid(a, b);
        rec(p0, a, m, tol, depth + 1, out);
        rec(m, b, p2, tol, depth + 1, out);
    }
    let mut out = vec![p0];
    rec(p0, p1, p2, tol, 0, &mut out);
    out
}

pub fn polyline_length(pts: &[(f64, f64)]) -> f64 {
    pts.windows(2).map(|s| ((s[1].0 - s[0].0).powi(2) + (s[1].1 - s[0].1).powi(2)).sqrt()).sum()
}

/// Random quadratic pencil strokes, darken-blended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PencilScribbles {
    pub stroke_count: Sampled<u32>,
    pub thickness: Sampled<u32>,
    pub gray: Sampled<u8>,
    /// Control-point reach as a fraction of the shorter side.
    pub extent: f64,
}

impl Default for PencilScribbles {
    fn default() -> Self {
        Self { stroke_count: Sampled::Range([1, 4]), thickness: Sampled::Range([1, 3]), gray: Sampled::Range([40, 120]), extent: 0.4 }
    }
}

impl PencilScribbles {
    pub const TOLERANCE: f64 = 0.25;

    /// Flattened stroke paths, three random control points each.
    pub fn paths(&self, w: usize, h: usize, rng: &mut StreamRng) -> Vec<Vec<(f64, f64)>> {
        let reach = self.extent * w.min(h) as f64;
        let (mx, my) = ((w - 1) as f64, (h - 1) as f64);
        (0..self.stroke_count.value())
            .map(|_| {
                let p0 = (rng.range_f64(0.0, mx), rng.range_f64(0.0, my));
                let mut near = || {
                    ((p0.0 + rng.range_f64(-reach, reach)).clamp(0.0, mx), (p0.1 + rng.range_f64(-reach, reach)).clamp(0.0, my))
                };
                let p1 = near();
                let p2 = near();
                flatten_quadratic(p0, p1, p2, Self::TOLERANCE)
            })
            .collect()
    }
}

impl EffectParams for PencilScribbles {
    const KIND: &'static str = "pencil_scribbles";
    const FAMILY: Family = Family::Multiple;

    fn validate(&self) -> Result<()> {
        self.stroke_count.check(Self::KIND, "stroke_count", 0, 64)?;
        self.thickness.check(Self::KIND, "thickness", 1, 16)?;
        self.gray.check(Self::KIND, "gray", 0, 200)?;
        if !(0.0..=1.0).contains(&self.extent) {
            return Err(Error::param(Self::KIND, "extent", "must lie in [0, 1]"));
        }
        Ok(())
    }

    fn resolve(&self, rng: &mut StreamRng) -> Self {
        Self {
            stroke_count: self.stroke_count.resolve(rng),
            thickness: self.thickness.resolve(rng),
            gray: self.gray.resolve(rng),
            extent: self.extent,
        }
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        if self.stroke_count.value() == 0 {
            return Ok(img.clone());
        }
        let (w, h, _) = img.dims();
        let t = self.thickness.value() as f64;
        let mut cov = vec![false; w * h];
        for path in self.paths(w, h, rng) {
            for (c, s) in cov.iter_mut().zip(stroke_coverage(w, h, &path, t)) {
                *c |= s;
            }
        }
        let g = self.gray.value();
        Ok(paint(img, &cov, [g; 3], BlendMode::Darken))
    }

    fn identity() -> Option<Self> {
        Some(Self { stroke_count: Sampled::Fixed(0), ..Self::default() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run<P: EffectParams>(p: &P, img: &Raster, seed: u64) -> Raster {
        let mut rng = StreamRng::seeded(seed);
        let p = EffectParams::resolve(p, &mut rng);
        EffectParams::apply(&p, img, &mut rng).unwrap()
    }

    fn mean_sd(v: &[u8]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().map(|&x| x as f64).sum::<f64>() / n;
        (m, (v.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / n).sqrt())
    }

    #[test]
    fn multiplicative_effects_fix_black() {
        let black = Raster::filled(64, 48, 3, 0);
        assert_eq!(run(&BrightnessTexturize::default(), &black, 1), black);
        assert_eq!(run(&DirtyDrum::default(), &black, 1), black);
        assert_eq!(run(&DirtyRollers::default(), &black, 1), black);
        assert_eq!(run(&NoiseTexturize::default(), &black, 1), black);
    }

    #[test]
    fn brightness_texturize_white_statistics() {
        let white = Raster::filled(256, 256, 3, 255);
        let p = BrightnessTexturize { deviation: Sampled::Fixed(0.1), passes: 1 };
        let (m, sd) = mean_sd(run(&p, &white, 4).samples());
        assert!((255.0 * 0.94..=255.0).contains(&m), "{m}");
        assert!(sd > 0.0);
    }

    #[test]
    fn brightness_texturize_keeps_hue() {
        let img = Raster::filled(8, 8, 3, 0).with_samples([200u8, 100, 50].repeat(64));
        let out = run(&BrightnessTexturize { deviation: Sampled::Fixed(0.2), passes: 2 }, &img, 2);
        for px in out.samples().chunks(3) {
            let ratio = px[1] as f64 / px[0] as f64;
            assert!((ratio - 0.5).abs() < 0.02, "{px:?}");
        }
    }

    #[test]
    fn dirty_drum_column_bands() {
        let white = Raster::filled(64, 32, 1, 200);
        let p = DirtyDrum { direction: Direction::V, band_width: Sampled::Fixed(8), intensity: Sampled::Fixed(0.2) };
        let out = run(&p, &white, 7);
        for x in 0..64 {
            let col: Vec<u8> = (0..32).map(|y| out.pixel(x, y)[0]).collect();
            assert!(col.iter().all(|&v| v == col[0]));
            assert_eq!(col[0], out.pixel(x / 8 * 8, 0)[0]);
        }
        let one = DirtyDrum { direction: Direction::H, band_width: Sampled::Fixed(32), intensity: Sampled::Fixed(0.2) };
        assert!(run(&one, &white, 3).is_constant());
    }

    #[test]
    fn dirty_rollers_share_gain_within_band() {
        let img = Raster::filled(50, 120, 1, 180);
        let p = DirtyRollers::default();
        let out = run(&p, &img, 5);
        let bands = p.bands(120, &mut StreamRng::seeded(5));
        for (y, n, _) in bands {
            let row = |r: usize| out.samples()[r * 50..(r + 1) * 50].iter().map(|&v| v as f64).sum::<f64>() / 50.0;
            for r in y..y + n {
                assert!((row(r) - row(y)).abs() <= 1.0);
            }
        }
        assert_eq!(run(&p, &img, 5), out);
    }

    #[test]
    fn dithering_contracts() {
        for mode in [DitherMode::Ordered, DitherMode::ErrorDiffusion] {
            let p = Dithering { mode };
            for v in [0u8, 255] {
                let flat = Raster::filled(20, 20, 1, v);
                assert_eq!(run(&p, &flat, 0), flat);
            }
            let page = crate::fixtures::text_page(80, 60, 3, 1);
            assert!(run(&p, &page, 0).samples().iter().all(|&v| v == 0 || v == 255));
        }
        let ramp = Raster::from_fn_gray(256, 32, |x, _| x as u8);
        let out = run(&Dithering { mode: DitherMode::ErrorDiffusion }, &ramp, 0);
        let (a, _) = mean_sd(ramp.samples());
        let (b, _) = mean_sd(out.samples());
        assert!((a - b).abs() <= 2.0, "{a} vs {b}");
        let ordered = Dithering { mode: DitherMode::Ordered };
        let once = run(&ordered, &ramp, 0);
        assert_eq!(run(&ordered, &once, 0), once);
    }

    #[test]
    fn geometric_identity_flip_and_scale() {
        let page = crate::fixtures::text_page(100, 80, 3, 2);
        assert_eq!(run(&Geometric::identity().unwrap(), &page, 0), page);
        let flip = Geometric { flip_h: true, ..Geometric::identity().unwrap() };
        assert_eq!(run(&flip, &run(&flip, &page, 0), 0), page);
        let half = Geometric { scale: Sampled::Fixed(0.5), ..Geometric::identity().unwrap() };
        assert_eq!(run(&half, &page, 0).dims(), (50, 40, 1));
        let crop = Geometric { crop: Some([10, 5, 30, 20]), ..Geometric::identity().unwrap() };
        assert_eq!(run(&crop, &page, 0), page.crop(10, 5, 30, 20).unwrap());
    }

    #[test]
    fn noise_texturize_is_spatially_correlated() {
        let white = Raster::filled(128, 128, 1, 255);
        let p = NoiseTexturize { strength: Sampled::Fixed(0.3), octaves: 3, base_scale: Sampled::Fixed(32.0), persistence: 0.5 };
        let out = run(&p, &Raster::filled(128, 128, 1, 180), 1);
        assert_ne!(run(&p, &white, 1), white);
        let (_, sd) = mean_sd(out.samples());
        let diffs = |r: &Raster| -> Vec<u8> {
            let s = r.samples();
            (0..128).flat_map(|y| (0..127).map(move |x| (y, x))).map(|(y, x)| s[y * 128 + x].abs_diff(s[y * 128 + x + 1])).collect()
        };
        let (_, smooth) = mean_sd(&diffs(&out));
        let mut rng = StreamRng::seeded(9);
        let iid = Raster::from_fn_gray(128, 128, |_, _| clamp_u8(180.0 + rng.normal(0.0, sd)));
        let (_, rough) = mean_sd(&diffs(&iid));
        assert!(smooth < rough, "{smooth} vs {rough}");
    }

    #[test]
    fn flattening_respects_tolerance() {
        let (p0, p1, p2) = ((0.0, 0.0), (50.0, 80.0), (100.0, 0.0));
        let pts = flatten_quadratic(p0, p1, p2, 0.25);
        let exact = |t: f64| {
            let u = 1.0 - t;
            (u * u * p0.0 + 2.0 * u * t * p1.0 + t * t * p2.0, u * u * p0.1 + 2.0 * u * t * p1.1 + t * t * p2.1)
        };
        for k in 0..=1000 {
            let (x, y) = exact(k as f64 / 1000.0);
            let d = pts
                .windows(2)
                .map(|s| {
                    let (dx, dy) = (s[1].0 - s[0].0, s[1].1 - s[0].1);
                    let t = (((x - s[0].0) * dx + (y - s[0].1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
                    ((s[0].0 + t * dx - x).powi(2) + (s[0].1 + t * dy - y).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            assert!(d <= 0.25 + 1e-9);
        }
    }

    #[test]
    fn one_scribble_has_length_proportional_ink() {
        let white = Raster::filled(200, 200, 1, 255);
        for seed in 0..20 {
            for t in 1..=3u32 {
                let p = PencilScribbles { stroke_count: Sampled::Fixed(1), thickness: Sampled::Fixed(t), gray: Sampled::Fixed(80), extent: 0.4 };
                let mut rng = StreamRng::seeded(seed);
                let p = EffectParams::resolve(&p, &mut rng);
                let len = polyline_length(&p.paths(200, 200, &mut rng.clone())[0]);
                let out = EffectParams::apply(&p, &white, &mut rng).unwrap();
                let dark = out.samples().iter().filter(|&&v| v < 255).count() as f64;
                if len < 5.0 {
                    continue;
                }
                let t = t as f64;
                assert!(dark >= t * len * 0.5 && dark <= t * len * 2.0, "seed {seed} t {t}: {dark} px for length {len}");
                assert!(out.samples().iter().all(|&v| v == 255 || v == 80));
            }
        }
    }
}
