//! The augmentation catalog, grouped by the phase each effect is meant for.

pub mod ink;
pub mod multi;
pub mod paper;
pub mod post;

use crate::effect::{Registration, Registry};
use crate::error::Result;
use crate::params::Sampled;
use crate::raster::{clamp_u8, Raster};
use crate::synthesis::BlendMode;

pub use ink::{BleedThrough, InkBleed, Letterpress, LowInkLines};
pub use multi::{BrightnessTexturize, DirtyDrum, DirtyRollers, Dithering, Geometric, NoiseTexturize, PencilScribbles};
pub use paper::{ColorPaper, Gamma, LightingGradient, PaperFactory, SubtleNoise, Watermark};
pub use post::{BadPhotocopy, BindingsAndFasteners, BookBinding, Faxify, Folding, Jpeg, Markup, PageBorder};

pub fn register_all(r: &mut Registry) {
    r.register(Registration::of::<BleedThrough>())
        .register(Registration::of::<LowInkLines>())
        .register(Registration::of::<InkBleed>())
        .register(Registration::of::<Letterpress>())
        .register(Registration::of::<ColorPaper>())
        .register(Registration::of::<Watermark>())
        .register(Registration::of::<Gamma>())
        .register(Registration::of::<LightingGradient>())
        .register(Registration::of::<SubtleNoise>())
        .register(Registration::of::<PaperFactory>())
        .register(Registration::of::<BadPhotocopy>())
        .register(Registration::of::<BindingsAndFasteners>())
        .register(Registration::of::<BookBinding>())
        .register(Registration::of::<Folding>())
        .register(Registration::of::<Jpeg>())
        .register(Registration::of::<Markup>())
        .register(Registration::of::<Faxify>())
        .register(Registration::of::<PageBorder>())
        .register(Registration::of::<BrightnessTexturize>())
        .register(Registration::of::<DirtyDrum>())
        .register(Registration::of::<DirtyRollers>())
        .register(Registration::of::<Dithering>())
        .register(Registration::of::<Geometric>())
        .register(Registration::of::<NoiseTexturize>())
        .register(Registration::of::<PencilScribbles>());
}

pub(crate) fn check_unit(kind: &str, field: &str, v: &Sampled<f64>) -> Result<()> {
    v.check(kind, field, 0.0, 1.0)
}

/// Moves every sample `amount` of the way toward 255.
pub(crate) fn lighten_toward_white(px: &mut [u8], amount: f64) {
    for v in px {
        *v = clamp_u8(*v as f64 + amount * (255 - *v) as f64);
    }
}

/// Multiplies every channel of pixel `i` by `gain(i)`, clamping.
pub(crate) fn multiply_gain(img: &Raster, gain: impl Fn(usize) -> f64) -> Raster {
    let c = img.channels();
    let samples = img
        .samples()
        .chunks_exact(c)
        .enumerate()
        .flat_map(|(i, px)| {
            let g = gain(i);
            px.iter().map(move |&v| clamp_u8(v as f64 * g))
        })
        .collect();
    img.with_samples(samples)
}

/// Coverage of a polyline stroked with a round brush of the given width.
pub(crate) fn stroke_coverage(w: usize, h: usize, pts: &[(f64, f64)], width: f64) -> Vec<bool> {
    let r = (width / 2.0).max(0.5);
    let mut cov = vec![false; w * h];
    let segs: Vec<_> = if pts.len() == 1 { vec![(pts[0], pts[0])] } else { pts.windows(2).map(|s| (s[0], s[1])).collect() };
    for ((x0, y0), (x1, y1)) in segs {
        let lo_x = (x0.min(x1) - r).floor().max(0.0) as usize;
        let lo_y = (y0.min(y1) - r).floor().max(0.0) as usize;
        let hi_x = ((x0.max(x1) + r).ceil().max(0.0) as usize).min(w.saturating_sub(1));
        let hi_y = ((y0.max(y1) + r).ceil().max(0.0) as usize).min(h.saturating_sub(1));
        let (dx, dy) = (x1 - x0, y1 - y0);
        let len2 = dx * dx + dy * dy;
        for y in lo_y..=hi_y {
            for x in lo_x..=hi_x {
                let (px, py) = (x as f64, y as f64);
                let t = if len2 == 0.0 { 0.0 } else { (((px - x0) * dx + (py - y0) * dy) / len2).clamp(0.0, 1.0) };
                let (qx, qy) = (x0 + t * dx - px, y0 + t * dy - py);
                if qx * qx + qy * qy <= r * r {
                    cov[y * w + x] = true;
                }
            }
        }
    }
    cov
}

/// Blends a solid colour into every covered pixel. Gray images are promoted when the colour is not gray.
pub(crate) fn paint(img: &Raster, cov: &[bool], color: [u8; 3], mode: BlendMode) -> Raster {
    let gray = color[0] == color[1] && color[1] == color[2];
    let mut out = if gray { img.clone() } else { img.to_rgb() };
    let c = out.channels();
    for (i, px) in out.samples_mut().chunks_exact_mut(c).enumerate() {
        if cov[i] {
            for (ch, v) in px.iter_mut().enumerate() {
                *v = mode.apply(color[ch.min(2)], *v);
            }
        }
    }
    out
}
