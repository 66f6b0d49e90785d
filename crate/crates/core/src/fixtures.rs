//! Synthetic test pages and the shared per-effect cases used by golden and sweep tests.

use std::path::Path;

use serde_json::{json, Value};

use crate::effect::{catalog, Effect};
use crate::error::Result;
use crate::raster::{encode, Format, Raster};
use crate::rng::StreamRng;

pub const GOLDEN_SIZE: usize = 128;
pub const GOLDEN_SEED: u64 = 1729;
pub const TEXTURE_FILE: &str = "paper_fibers.png";

/// A gray page of `lines` text lines drawn as black glyph blocks with a one-pixel gray fringe.
///
/// Margins take 8% of each side; glyphs fill 45% of the line pitch, leaving at least three blank
/// rows between lines. Deterministic in `seed`.
pub fn text_page(w: usize, h: usize, lines: usize, seed: u64) -> Raster {
    let mut page = Raster::filled(w, h, 1, 255);
    if lines == 0 {
        return page;
    }
    let mut rng = StreamRng::seeded(seed);
    let (mx, my) = (w * 8 / 100 + 1, h * 8 / 100 + 1);
    let pitch = (h - 2 * my) as f64 / lines as f64;
    let glyph_h = ((pitch * 0.45).round() as usize).clamp(2, (pitch as usize).saturating_sub(3).max(2));
    for k in 0..lines {
        let top = my + (k as f64 * pitch + (pitch - glyph_h as f64) / 2.0) as usize;
        let right = w - mx - rng.index((w / 6).max(1));
        let mut x = mx;
        while x + 2 < right {
            let word = 2 + rng.index(5);
            for _ in 0..word {
                let gw = 2 + rng.index(4);
                if x + gw >= right {
                    break;
                }
                for y in top..(top + glyph_h).min(h) {
                    for gx in x..x + gw {
                        page.pixel_mut(gx, y)[0] = 0;
                    }
                    if x > 0 && page.pixel(x - 1, y)[0] == 255 {
                        page.pixel_mut(x - 1, y)[0] = 110;
                    }
                    page.pixel_mut(x + gw, y)[0] = 170;
                }
                x += gw + 2;
            }
            x += 4;
        }
    }
    page
}

/// Off-white RGB paper with faint horizontal fibres.
pub fn paper_texture(w: usize, h: usize, seed: u64) -> Raster {
    let mut rng = StreamRng::seeded(seed);
    let rows: Vec<i64> = (0..h).map(|_| rng.range_i64(-6, 0)).collect();
    Raster::from_fn_rgb(w, h, |_, y| {
        let d = rows[y] + rng.range_i64(-3, 3);
        [(240 + d) as u8, (234 + d) as u8, (218 + d) as u8]
    })
}

/// Writes a single generated texture into `dir` for paper_factory.
pub fn write_texture_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(TEXTURE_FILE), encode(&paper_texture(160, 200, 3), Format::Png)?)?;
    Ok(())
}

fn build(kind: &str, mut params: Value, texture_dir: Option<&Path>) -> Result<Box<dyn Effect>> {
    if let (Some(dir), Some(obj)) = (texture_dir, params.as_object_mut()) {
        if obj.contains_key("texture_dir") {
            obj.insert("texture_dir".into(), json!(dir));
        }
    }
    catalog().get(kind)?.build(&params)
}

/// The page every golden image is rendered from.
pub fn golden_page() -> Raster {
    text_page(GOLDEN_SIZE, GOLDEN_SIZE, 6, 5)
}

/// One effect at its default parameters, resolved and applied to `golden_page` with `GOLDEN_SEED`.
pub fn golden_case(kind: &str, texture_dir: &Path) -> Result<Raster> {
    let e = build(kind, catalog().get(kind)?.default_effect().params_json(), Some(texture_dir))?;
    let mut rng = StreamRng::seeded(GOLDEN_SEED);
    e.resolve(&mut rng).apply(&golden_page(), &mut rng)
}

fn midpoint(v: &Value) -> Option<Value> {
    let [a, b] = v.as_array()?.as_slice() else { return None };
    if let (Some(a), Some(b)) = (a.as_i64(), b.as_i64()) {
        return Some(json!(((a + b) as f64 / 2.0).round() as i64));
    }
    Some(json!((a.as_f64()? + b.as_f64()?) / 2.0))
}

fn to_mid(v: &Value) -> Value {
    if let Some(m) = midpoint(v) {
        return m;
    }
    match v {
        Value::Array(items) => Value::Array(items.iter().map(to_mid).collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), to_mid(v))).collect()),
        other => other.clone(),
    }
}

/// Default parameters with every `[lo, hi]` range replaced by its midpoint. Fields whose
/// two-number arrays are fixed pairs rather than ranges keep their defaults.
pub fn mid_range(kind: &str, texture_dir: Option<&Path>) -> Result<Box<dyn Effect>> {
    let defaults = catalog().get(kind)?.default_effect().params_json();
    let mut params = defaults.clone();
    if let Some(obj) = defaults.as_object() {
        for (field, value) in obj {
            let mid = to_mid(value);
            if mid == *value {
                continue;
            }
            let mut trial = params.clone();
            trial[field.as_str()] = mid;
            if build(kind, trial.clone(), texture_dir).is_ok() {
                params = trial;
            }
        }
    }
    build(kind, params, texture_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_inked() {
        let a = text_page(120, 90, 4, 7);
        assert_eq!(a, text_page(120, 90, 4, 7));
        assert_ne!(a, text_page(120, 90, 4, 8));
        let ink = a.samples().iter().filter(|&&v| v == 0).count();
        assert!(ink > 120 * 90 / 20);
    }

    #[test]
    fn mid_range_fixes_ranges_and_keeps_pairs() {
        let e = mid_range("bleed_through", None).unwrap().params_json();
        assert_eq!(e["alpha"], json!(0.25));
        assert_eq!(e["offset"], json!([6, 4]));
        let e = mid_range("lighting_gradient", None).unwrap().params_json();
        assert_eq!(e["center"], json!([0.5, 0.5]));
        assert_eq!(mid_range("page_border", None).unwrap().params_json()["widths"], json!([10, 10, 10, 10]));
    }

    #[test]
    fn every_kind_has_a_mid_range_setting() {
        let dir = tempfile::tempdir().unwrap();
        write_texture_dir(dir.path()).unwrap();
        for kind in catalog().kinds() {
            mid_range(kind, Some(dir.path())).unwrap();
        }
    }
}
