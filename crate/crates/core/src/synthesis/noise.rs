use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{blur_plane, clamp_u8, Raster};
use crate::rng::StreamRng;

/// Parameters of the clustered-blob mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlobParams {
    pub clusters: u32,
    pub points_per_cluster: u32,
    /// Standard deviation of each cluster's point cloud, in pixels.
    pub spread_sigma: f64,
    /// Blur applied to the splatted density; 0 disables it.
    pub blur_sigma: f64,
    /// Density level (0..=255) a pixel must exceed to count as noisy.
    pub threshold: u8,
}

impl Default for BlobParams {
    fn default() -> Self {
        Self { clusters: 4, points_per_cluster: 500, spread_sigma: 8.0, blur_sigma: 1.5, threshold: 16 }
    }
}

impl BlobParams {
    pub fn validate(&self, kind: &str) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::param(kind, "clusters", "must be at least 1"));
        }
        if !self.spread_sigma.is_finite() || self.spread_sigma <= 0.0 {
            return Err(Error::param(kind, "spread_sigma", "must be positive"));
        }
        if !self.blur_sigma.is_finite() || self.blur_sigma < 0.0 {
            return Err(Error::param(kind, "blur_sigma", "must be non-negative"));
        }
        Ok(())
    }
}

/// Clustered noise mask: 0 is fully dark, 255 clean.
///
/// Cluster centres are uniform over the canvas; each cluster scatters `points_per_cluster`
/// Gaussian samples which are splatted into a density plane, blurred, and scaled so one point
/// per pixel reads as full darkness. Pixels whose density exceeds `threshold` become
/// `255 - density`; the rest stay clean.
pub fn make_blob_mask(w: usize, h: usize, params: &BlobParams, rng: &mut StreamRng) -> Result<Raster> {
    params.validate("blob_mask")?;
    let mut density = vec![0.0f64; w * h];
    for _ in 0..params.clusters {
        let cx = rng.range_f64(0.0, w as f64);
        let cy = rng.range_f64(0.0, h as f64);
        for _ in 0..params.points_per_cluster {
            let x = rng.normal(cx, params.spread_sigma).round();
            let y = rng.normal(cy, params.spread_sigma).round();
            if x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h {
                density[y as usize * w + x as usize] += 1.0;
            }
        }
    }
    if params.blur_sigma > 0.0 && params.points_per_cluster > 0 {
        density = blur_plane(&density, w, h, params.blur_sigma);
    }
    let samples = density
        .into_iter()
        .map(|d| {
            let level = clamp_u8(d * 255.0);
            if level > params.threshold { 255 - level } else { 255 }
        })
        .collect();
    Raster::new(w, h, 1, samples)
}

/// Multi-octave value noise normalized to the full 0..=255 range.
///
/// Octave `k` uses a lattice of spacing `base_scale / 2^k` (at least 1 px) with uniform random
/// node values, bilinearly interpolated, weighted by `persistence^k`.
pub fn value_noise(w: usize, h: usize, base_scale: f64, octaves: u32, persistence: f64, rng: &mut StreamRng) -> Result<Raster> {
    if base_scale.is_nan() || base_scale < 2.0 {
        return Err(Error::param("value_noise", "base_scale", format!("must be at least 2, got {base_scale}")));
    }
    if octaves == 0 {
        return Err(Error::param("value_noise", "octaves", "must be at least 1"));
    }
    if !(0.0..=1.0).contains(&persistence) {
        return Err(Error::param("value_noise", "persistence", "must lie in [0, 1]"));
    }
    let mut field = vec![0.0f64; w * h];
    let mut amplitude = 1.0;
    for k in 0..octaves {
        let scale = (base_scale / 2f64.powi(k as i32)).max(1.0);
        let nx = (w as f64 / scale).ceil() as usize + 2;
        let ny = (h as f64 / scale).ceil() as usize + 2;
        let lattice: Vec<f64> = (0..nx * ny).map(|_| rng.uniform()).collect();
        for y in 0..h {
            let fy = y as f64 / scale;
            let y0 = fy.floor() as usize;
            let ty = fy - y0 as f64;
            for x in 0..w {
                let fx = x as f64 / scale;
                let x0 = fx.floor() as usize;
                let tx = fx - x0 as f64;
                let at = |xx: usize, yy: usize| lattice[yy * nx + xx];
                let top = at(x0, y0) * (1.0 - tx) + at(x0 + 1, y0) * tx;
                let bot = at(x0, y0 + 1) * (1.0 - tx) + at(x0 + 1, y0 + 1) * tx;
                field[y * w + x] += amplitude * (top * (1.0 - ty) + bot * ty);
            }
        }
        amplitude *= persistence;
    }
    let (lo, hi) = field.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    let samples = field
        .into_iter()
        .map(|v| if span > 0.0 { clamp_u8((v - lo) / span * 255.0) } else { 128 })
        .collect();
    Raster::new(w, h, 1, samples)
}
