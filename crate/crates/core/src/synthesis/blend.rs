use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Raster;
use crate::rng::StreamRng;

/// Per-pixel compositing rule, foreground over background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum BlendMode {
    Normal { alpha: f64 },
    Multiply,
    Darken,
    Lighten,
    Screen,
    /// Multiply below a background of 128, screen at or above it.
    Overlay,
    Min,
    Max,
}

impl BlendMode {
    #[inline]
    pub fn apply(&self, fg: u8, bg: u8) -> u8 {
        let (f, b) = (fg as u32, bg as u32);
        match *self {
            BlendMode::Normal { alpha } => {
                crate::raster::clamp_u8(alpha * fg as f64 + (1.0 - alpha) * bg as f64)
            }
            BlendMode::Multiply => div255(f * b),
            BlendMode::Darken | BlendMode::Min => fg.min(bg),
            BlendMode::Lighten | BlendMode::Max => fg.max(bg),
            BlendMode::Screen => 255 - div255((255 - f) * (255 - b)),
            BlendMode::Overlay => {
                if b < 128 {
                    div255(2 * f * b)
                } else {
                    255 - div255(2 * (255 - f) * (255 - b))
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let BlendMode::Normal { alpha } = self {
            if !(0.0..=1.0).contains(alpha) {
                return Err(Error::param("blend", "alpha", format!("{alpha} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// `round(v / 255)` for non-negative integers, half rounding up.
#[inline]
fn div255(v: u32) -> u8 {
    ((2 * v + 255) / 510).min(255) as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    #[default]
    Center,
    TopEdge,
    BottomEdge,
    LeftEdge,
    RightEdge,
    Absolute { x: i64, y: i64 },
    Random,
}

/// Where foreground copies land on the background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Placement {
    pub anchor: Anchor,
    /// Distance from the anchoring edge, in pixels.
    pub edge_offset: usize,
    /// Copies spread evenly along the edge (or scattered for `random`).
    pub tile_count: usize,
}

impl Default for Placement {
    fn default() -> Self {
        Self { anchor: Anchor::Center, edge_offset: 0, tile_count: 1 }
    }
}

impl Placement {
    pub fn at(anchor: Anchor) -> Self {
        Self { anchor, ..Self::default() }
    }

    /// Top-left corners of every placed copy, clipped inside the background.
    pub fn positions(&self, fg: (usize, usize), bg: (usize, usize), rng: &mut StreamRng) -> Result<Vec<(usize, usize)>> {
        let (fw, fh) = fg;
        let (bw, bh) = bg;
        if fw > bw || fh > bh {
            return Err(Error::Placement(format!("foreground {fw}x{fh} larger than background {bw}x{bh}")));
        }
        let max_x = bw - fw;
        let max_y = bh - fh;
        let n = self.tile_count.max(1);
        let spread = |k: usize, len: usize, size: usize, max: usize| -> usize {
            let centre = (k as f64 + 0.5) * len as f64 / n as f64;
            ((centre - size as f64 / 2.0).round().max(0.0) as usize).min(max)
        };
        let off_x = self.edge_offset.min(max_x);
        let off_y = self.edge_offset.min(max_y);
        let out = match self.anchor {
            Anchor::Center => vec![(max_x / 2, max_y / 2)],
            Anchor::Absolute { x, y } => vec![(x.clamp(0, max_x as i64) as usize, y.clamp(0, max_y as i64) as usize)],
            Anchor::TopEdge => (0..n).map(|k| (spread(k, bw, fw, max_x), off_y)).collect(),
            Anchor::BottomEdge => (0..n).map(|k| (spread(k, bw, fw, max_x), max_y - off_y)).collect(),
            Anchor::LeftEdge => (0..n).map(|k| (off_x, spread(k, bh, fh, max_y))).collect(),
            Anchor::RightEdge => (0..n).map(|k| (max_x - off_x, spread(k, bh, fh, max_y))).collect(),
            Anchor::Random => (0..n)
                .map(|_| (rng.range_i64(0, max_x as i64) as usize, rng.range_i64(0, max_y as i64) as usize))
                .collect(),
        };
        Ok(out)
    }
}

/// Composites `fg` onto `bg` at every position chosen by `placement`. Gray inputs are
/// promoted to RGB when the other side is RGB. Pixels outside the placed regions are copied.
pub fn blend(fg: &Raster, bg: &Raster, mode: BlendMode, placement: &Placement, rng: &mut StreamRng) -> Result<Raster> {
    mode.validate()?;
    let positions = placement.positions((fg.width(), fg.height()), (bg.width(), bg.height()), rng)?;
    let c = fg.channels().max(bg.channels());
    let fg = fg.with_channels(c);
    let mut out = bg.with_channels(c);
    for (px, py) in positions {
        blend_at(&fg, &mut out, mode, px, py);
    }
    Ok(out)
}

/// Composites in place with the foreground's top-left at `(px, py)`; the caller guarantees fit
/// and matching channel counts.
pub(crate) fn blend_at(fg: &Raster, out: &mut Raster, mode: BlendMode, px: usize, py: usize) {
    let c = out.channels();
    let fw = fg.width() * c;
    for y in 0..fg.height() {
        let src = &fg.samples()[y * fw..(y + 1) * fw];
        let start = out.index(px, py + y);
        let dst = &mut out.samples_mut()[start..start + fw];
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = mode.apply(s, *d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MODES: [BlendMode; 8] = [
        BlendMode::Normal { alpha: 0.4 },
        BlendMode::Multiply,
        BlendMode::Darken,
        BlendMode::Lighten,
        BlendMode::Screen,
        BlendMode::Overlay,
        BlendMode::Min,
        BlendMode::Max,
    ];

    #[test]
    fn pixel_formulas() {
        assert_eq!(BlendMode::Screen.apply(128, 128), 192);
        assert_eq!(BlendMode::Multiply.apply(128, 128), 64);
        assert_eq!(BlendMode::Overlay.apply(200, 127), 199);
        assert_eq!(BlendMode::Overlay.apply(200, 128), 200);
        assert_eq!(BlendMode::Normal { alpha: 0.5 }.apply(0, 255), 128);
    }

    #[test]
    fn identity_elements() {
        for v in 0..=255u8 {
            assert_eq!(BlendMode::Multiply.apply(v, 255), v);
            assert_eq!(BlendMode::Multiply.apply(255, v), v);
            assert_eq!(BlendMode::Darken.apply(v, 255), v);
            assert_eq!(BlendMode::Screen.apply(v, 0), v);
            assert_eq!(BlendMode::Screen.apply(0, v), v);
            assert_eq!(BlendMode::Lighten.apply(v, 0), v);
        }
    }

    /// Exhaustive check of the integer rounding against the real-valued formulas.
    #[test]
    fn rounding_matches_real_formulas() {
        for f in 0..=255u32 {
            for b in 0..=255u32 {
                let (ff, bf) = (f as f64, b as f64);
                let mul = (ff * bf / 255.0).round() as u8;
                let scr = (255.0 - (255.0 - ff) * (255.0 - bf) / 255.0).round() as u8;
                assert_eq!(BlendMode::Multiply.apply(f as u8, b as u8), mul);
                assert_eq!(BlendMode::Screen.apply(f as u8, b as u8), scr);
            }
        }
    }

    #[test]
    fn multiply_onto_white_copies_foreground() {
        let fg = Raster::from_fn_gray(4, 3, |x, y| (x * 40 + y * 7) as u8);
        let bg = Raster::filled(10, 10, 1, 255);
        let out = blend(&fg, &bg, BlendMode::Multiply, &Placement::at(Anchor::Absolute { x: 2, y: 5 }), &mut StreamRng::seeded(0)).unwrap();
        for y in 0..3 {
            for x in 0..4 {
                assert_eq!(out.pixel(x + 2, y + 5), fg.pixel(x, y));
            }
        }
    }

    #[test]
    fn oversized_foreground_is_rejected() {
        let err = blend(&Raster::filled(5, 2, 1, 0), &Raster::filled(4, 4, 1, 0), BlendMode::Darken, &Placement::default(), &mut StreamRng::seeded(0));
        assert!(matches!(err, Err(Error::Placement(_))));
    }

    #[test]
    fn gray_is_promoted() {
        let out = blend(&Raster::filled(1, 1, 3, 10), &Raster::filled(3, 3, 1, 200), BlendMode::Darken, &Placement::default(), &mut StreamRng::seeded(0)).unwrap();
        assert_eq!(out.channels(), 3);
        assert_eq!(out.pixel(1, 1), &[10, 10, 10]);
        assert_eq!(out.pixel(0, 0), &[200, 200, 200]);
    }

    #[test]
    fn edge_tiles_spread_evenly() {
        let p = Placement { anchor: Anchor::LeftEdge, edge_offset: 4, tile_count: 3 };
        let pos = p.positions((10, 10), (100, 90), &mut StreamRng::seeded(0)).unwrap();
        assert_eq!(pos, vec![(4, 10), (4, 40), (4, 70)]);
    }

    proptest! {
        #[test]
        fn darken_is_pointwise_min(f in any::<u8>(), b in any::<u8>()) {
            let v = BlendMode::Darken.apply(f, b);
            prop_assert!(v <= f && v <= b);
        }

        #[test]
        fn outside_region_is_untouched(
            fw in 1usize..8, fh in 1usize..8, x in -5i64..30, y in -5i64..30, mode_ix in 0usize..8, seed in any::<u64>(), rand_anchor in any::<bool>()
        ) {
            let fg = Raster::from_fn_gray(fw, fh, |a, b| (a * 31 + b * 17) as u8);
            let bg = Raster::from_fn_rgb(20, 16, |a, b| [(a * 11) as u8, (b * 13) as u8, 90]);
            let anchor = if rand_anchor { Anchor::Random } else { Anchor::Absolute { x, y } };
            let placement = Placement { anchor, edge_offset: 0, tile_count: 1 };
            let mut rng = StreamRng::seeded(seed);
            let pos = placement.positions((fw, fh), (20, 16), &mut rng.clone()).unwrap()[0];
            let out = blend(&fg, &bg, MODES[mode_ix], &placement, &mut rng).unwrap();
            for yy in 0..16 {
                for xx in 0..20 {
                    let inside = xx >= pos.0 && xx < pos.0 + fw && yy >= pos.1 && yy < pos.1 + fh;
                    if !inside {
                        prop_assert_eq!(out.pixel(xx, yy), bg.pixel(xx, yy));
                    }
                }
            }
        }
    }
}
