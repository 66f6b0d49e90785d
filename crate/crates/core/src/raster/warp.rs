use serde::{Deserialize, Serialize};

use super::{clamp_u8, color::luma_of, Raster};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    Nearest,
    #[default]
    Bilinear,
}

/// Forward affine map `[x', y'] = [[a, b, c], [d, e, f]] * [x, y, 1]` from source to destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine(pub [[f64; 3]; 2]);

impl Affine {
    pub const IDENTITY: Affine = Affine([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);

    pub fn translation(tx: f64, ty: f64) -> Self {
        Affine([[1.0, 0.0, tx], [0.0, 1.0, ty]])
    }

    /// Counter-clockwise rotation (in image coordinates, y down) about `(cx, cy)`.
    pub fn rotation_about(deg: f64, cx: f64, cy: f64) -> Self {
        let (s, c) = deg.to_radians().sin_cos();
        // Snap exact quarter turns so pixel-aligned rotations stay lossless.
        let snap = |v: f64| if (v - v.round()).abs() < 1e-12 { v.round() } else { v };
        let (s, c) = (snap(s), snap(c));
        Affine([[c, s, cx - c * cx - s * cy], [-s, c, cy + s * cx - c * cy]])
    }

    /// Composition: `next` applied after `self`.
    pub fn then(&self, next: &Affine) -> Affine {
        let a = &next.0;
        let b = &self.0;
        let mut m = [[0.0; 3]; 2];
        for r in 0..2 {
            m[r][0] = a[r][0] * b[0][0] + a[r][1] * b[1][0];
            m[r][1] = a[r][0] * b[0][1] + a[r][1] * b[1][1];
            m[r][2] = a[r][0] * b[0][2] + a[r][1] * b[1][2] + a[r][2];
        }
        Affine(m)
    }

    pub fn inverse(&self) -> Option<Affine> {
        let [[a, b, c], [d, e, f]] = self.0;
        let det = a * e - b * d;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let ia = e / det;
        let ib = -b / det;
        let id = -d / det;
        let ie = a / det;
        Some(Affine([[ia, ib, -(ia * c + ib * f)], [id, ie, -(id * c + ie * f)]]))
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let [[a, b, c], [d, e, f]] = self.0;
        (a * x + b * y + c, d * x + e * y + f)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

const EDGE_EPS: f64 = 1e-6;

fn fill_pixel(fill: [u8; 3], channels: usize) -> [u8; 3] {
    if channels == 1 {
        [luma_of(fill); 3]
    } else {
        fill
    }
}

/// Bilinear sample at a fractional source position; `None` outside the source.
#[inline]
fn sample_bilinear(r: &Raster, fx: f64, fy: f64, out: &mut [u8]) -> bool {
    let (w, h, c) = r.dims();
    if !(fx >= -EDGE_EPS && fy >= -EDGE_EPS && fx <= (w - 1) as f64 + EDGE_EPS && fy <= (h - 1) as f64 + EDGE_EPS) {
        return false;
    }
    let fx = fx.clamp(0.0, (w - 1) as f64);
    let fy = fy.clamp(0.0, (h - 1) as f64);
    let x0 = fx.floor() as usize;
    let y0 = fy.floor() as usize;
    let tx = fx - x0 as f64;
    let ty = fy - y0 as f64;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let s = r.samples();
    for ch in 0..c {
        let p = |x: usize, y: usize| s[(y * w + x) * c + ch] as f64;
        let top = p(x0, y0) * (1.0 - tx) + p(x1, y0) * tx;
        let bot = p(x0, y1) * (1.0 - tx) + p(x1, y1) * tx;
        out[ch] = clamp_u8(top * (1.0 - ty) + bot * ty);
    }
    true
}

pub fn resample(r: &Raster, new_w: usize, new_h: usize, filter: Filter) -> Result<Raster> {
    if new_w == 0 || new_h == 0 {
        return Err(Error::InvalidRaster(format!("resample target {new_w}x{new_h}")));
    }
    let (w, h, c) = r.dims();
    if (w, h) == (new_w, new_h) {
        return Ok(r.clone());
    }
    let sx = w as f64 / new_w as f64;
    let sy = h as f64 / new_h as f64;
    let mut out = vec![0u8; new_w * new_h * c];
    let mut px = [0u8; 3];
    for y in 0..new_h {
        for x in 0..new_w {
            let o = (y * new_w + x) * c;
            match filter {
                Filter::Nearest => {
                    let xs = (((x as f64 + 0.5) * sx) as usize).min(w - 1);
                    let ys = (((y as f64 + 0.5) * sy) as usize).min(h - 1);
                    out[o..o + c].copy_from_slice(r.pixel(xs, ys));
                }
                Filter::Bilinear => {
                    let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (w - 1) as f64);
                    let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (h - 1) as f64);
                    sample_bilinear(r, fx, fy, &mut px[..c]);
                    out[o..o + c].copy_from_slice(&px[..c]);
                }
            }
        }
    }
    Raster::new(new_w, new_h, c, out)
}

/// Affine warp onto a canvas of the source size. Samples falling outside the source take `fill`.
pub fn warp_affine(r: &Raster, matrix: &Affine, fill: [u8; 3]) -> Raster {
    warp_affine_to(r, matrix, fill, r.width(), r.height())
}

/// Affine warp onto an `out_w` x `out_h` canvas. A singular matrix yields a canvas of `fill`.
pub fn warp_affine_to(r: &Raster, matrix: &Affine, fill: [u8; 3], out_w: usize, out_h: usize) -> Raster {
    let c = r.channels();
    if matrix.is_identity() && (out_w, out_h) == (r.width(), r.height()) {
        return r.clone();
    }
    let fill = fill_pixel(fill, c);
    let mut out = vec![0u8; out_w * out_h * c];
    let inv = matrix.inverse();
    let mut px = [0u8; 3];
    for y in 0..out_h {
        for x in 0..out_w {
            let o = (y * out_w + x) * c;
            let hit = match &inv {
                Some(inv) => {
                    let (sx, sy) = inv.apply(x as f64, y as f64);
                    sample_bilinear(r, sx, sy, &mut px[..c])
                }
                None => false,
            };
            if hit {
                out[o..o + c].copy_from_slice(&px[..c]);
            } else {
                out[o..o + c].copy_from_slice(&fill[..c]);
            }
        }
    }
    Raster::new(out_w, out_h, c, out).expect("canvas dims are positive")
}

/// Per-pixel offsets in 1/16-pixel fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplacementField {
    width: usize,
    height: usize,
    dx: Vec<i32>,
    dy: Vec<i32>,
}

impl DisplacementField {
    pub const SCALE: f64 = 16.0;

    pub fn zero(width: usize, height: usize) -> Self {
        Self { width, height, dx: vec![0; width * height], dy: vec![0; width * height] }
    }

    /// Builds a field from a closure returning offsets in pixels; values are quantized to 1/16 px.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> (f64, f64)) -> Self {
        let mut field = Self::zero(width, height);
        for y in 0..height {
            for x in 0..width {
                let (dx, dy) = f(x, y);
                field.dx[y * width + x] = (dx * Self::SCALE).round() as i32;
                field.dy[y * width + x] = (dy * Self::SCALE).round() as i32;
            }
        }
        field
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Offset at a pixel, in pixels.
    pub fn offset(&self, x: usize, y: usize) -> (f64, f64) {
        let i = y * self.width + x;
        (self.dx[i] as f64 / Self::SCALE, self.dy[i] as f64 / Self::SCALE)
    }

    pub fn is_zero(&self) -> bool {
        self.dx.iter().chain(&self.dy).all(|&v| v == 0)
    }

    /// Source position for each destination pixel, in raster order.
    pub(crate) fn sources(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width).map(move |x| {
                let (dx, dy) = self.offset(x, y);
                (x, y, x as f64 + dx, y as f64 + dy)
            })
        })
    }
}

/// Samples `r` bilinearly at `(x + dx, y + dy)`; out-of-source positions take `fill`.
pub fn warp_displacement(r: &Raster, field: &DisplacementField, fill: [u8; 3]) -> Result<Raster> {
    let (w, h, c) = r.dims();
    if field.dims() != (w, h) {
        return Err(Error::DimensionMismatch { left: (w, h, c), right: (field.width, field.height, c) });
    }
    if field.is_zero() {
        return Ok(r.clone());
    }
    let fill = fill_pixel(fill, c);
    let mut out = vec![0u8; w * h * c];
    let mut px = [0u8; 3];
    for (x, y, sx, sy) in field.sources() {
        let o = (y * w + x) * c;
        if sample_bilinear(r, sx, sy, &mut px[..c]) {
            out[o..o + c].copy_from_slice(&px[..c]);
        } else {
            out[o..o + c].copy_from_slice(&fill[..c]);
        }
    }
    Ok(r.with_samples(out))
}
