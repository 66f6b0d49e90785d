use super::{clamp_u8, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorTarget {
    /// BT.601 luma, one channel.
    Gray,
    /// Three channels; gray is replicated.
    Rgb,
    /// HSV packed into three 8-bit channels: hue scaled from [0,360) onto 0..=255, S and V onto 0..=255.
    Hsv,
    /// Inverse of `Hsv`: interprets the three channels as packed HSV.
    RgbFromHsv,
}

/// BT.601 luma with round-half-up integer arithmetic.
#[inline]
pub fn luma_of(rgb: [u8; 3]) -> u8 {
    ((299 * rgb[0] as u32 + 587 * rgb[1] as u32 + 114 * rgb[2] as u32 + 500) / 1000) as u8
}

/// Per-pixel luma. Gray rasters return their samples.
pub fn luma(r: &Raster) -> Vec<u8> {
    if r.channels() == 1 {
        return r.samples().to_vec();
    }
    r.samples().chunks_exact(3).map(|p| luma_of([p[0], p[1], p[2]])).collect()
}

/// Float RGB (0..=255) to (hue degrees in [0,360), saturation 0..=1, value 0..=255).
pub fn rgb_to_hsv_f(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    (h.rem_euclid(360.0), s, max)
}

pub fn hsv_to_rgb_f(h: f64, s: f64, v: f64) -> (f64, f64, f64) {
    let c = v * s;
    let hp = h.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    (r1 + m, g1 + m, b1 + m)
}

pub(crate) fn hue_to_u8(deg: f64) -> u8 {
    (clamp_u8(deg * 255.0 / 360.0) as u16 % 255) as u8
}

/// Unpacks a hue byte. Sextant boundaries (multiples of 60 degrees) fall between bytes, so a
/// value within half a step of one snaps to it, keeping primaries and secondaries exact.
pub(crate) fn hue_from_u8(h: u8) -> f64 {
    let deg = h as f64 * 360.0 / 255.0;
    let edge = (deg / 60.0).round() * 60.0;
    if (deg - edge).abs() <= 180.0 / 255.0 + 1e-9 {
        edge % 360.0
    } else {
        deg
    }
}

pub fn color_convert(r: &Raster, target: ColorTarget) -> Raster {
    let (w, h, c) = r.dims();
    match target {
        ColorTarget::Gray => {
            if c == 1 {
                r.clone()
            } else {
                Raster::new(w, h, 1, luma(r)).expect("shape preserved")
            }
        }
        ColorTarget::Rgb => {
            if c == 3 {
                r.clone()
            } else {
                let samples = r.samples().iter().flat_map(|&v| [v, v, v]).collect();
                Raster::new(w, h, 3, samples).expect("shape preserved")
            }
        }
        ColorTarget::Hsv => {
            let rgb = color_convert(r, ColorTarget::Rgb);
            let samples = rgb
                .samples()
                .chunks_exact(3)
                .flat_map(|p| {
                    let (hh, s, v) = rgb_to_hsv_f(p[0] as f64, p[1] as f64, p[2] as f64);
                    [hue_to_u8(hh), clamp_u8(s * 255.0), clamp_u8(v)]
                })
                .collect();
            Raster::new(w, h, 3, samples).expect("shape preserved")
        }
        ColorTarget::RgbFromHsv => {
            let hsv = color_convert(r, ColorTarget::Rgb);
            let samples = hsv
                .samples()
                .chunks_exact(3)
                .flat_map(|p| {
                    let (rr, g, b) = hsv_to_rgb_f(hue_from_u8(p[0]), p[1] as f64 / 255.0, p[2] as f64);
                    [clamp_u8(rr), clamp_u8(g), clamp_u8(b)]
                })
                .collect();
            Raster::new(w, h, 3, samples).expect("shape preserved")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_weights() {
        assert_eq!(luma_of([255, 255, 255]), 255);
        // 0.299 * 255 = 76.245
        assert_eq!(luma_of([255, 0, 0]), 76);
        assert_eq!(luma_of([0, 255, 0]), 150);
        assert_eq!(luma_of([0, 0, 255]), 29);
    }

    #[test]
    fn gray_matches_float_formula() {
        for r in (0..=255).step_by(5) {
            for g in (0..=255).step_by(15) {
                for b in (0..=255).step_by(17) {
                    let f = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
                    let got = luma_of([r as u8, g as u8, b as u8]) as f64;
                    assert!((got - f).abs() <= 0.5 + 1e-9, "{r},{g},{b}: {got} vs {f}");
                }
            }
        }
    }

    #[test]
    fn packed_hsv_round_trips_corner_colors() {
        let levels = [0u8, 127, 255];
        for &r in &levels {
            for &g in &levels {
                for &b in &levels {
                    let px = Raster::new(1, 1, 3, vec![r, g, b]).unwrap();
                    let hsv = color_convert(&px, ColorTarget::Hsv);
                    let back = color_convert(&hsv, ColorTarget::RgbFromHsv);
                    for (a, z) in px.samples().iter().zip(back.samples()) {
                        assert!((*a as i32 - *z as i32).abs() <= 1, "{r},{g},{b} -> {:?}", back.samples());
                    }
                }
            }
        }
    }

    #[test]
    fn float_hsv_is_lossless() {
        for &(r, g, b) in &[(12.0, 200.0, 99.0), (255.0, 0.0, 128.0), (7.0, 7.0, 7.0), (0.0, 0.0, 0.0)] {
            let (h, s, v) = rgb_to_hsv_f(r, g, b);
            let (r2, g2, b2) = hsv_to_rgb_f(h, s, v);
            assert!((r - r2).abs() < 1e-9 && (g - g2).abs() < 1e-9 && (b - b2).abs() < 1e-9);
        }
    }

    #[test]
    fn rgb_replicates_gray() {
        let g = Raster::new(2, 1, 1, vec![3, 200]).unwrap();
        assert_eq!(g.to_rgb().samples(), &[3, 3, 3, 200, 200, 200]);
        assert_eq!(g.to_rgb().to_gray(), g);
    }
}
