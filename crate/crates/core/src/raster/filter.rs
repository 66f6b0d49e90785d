use super::{clamp_u8, luma, Raster};
use crate::error::{Error, Result};

/// Normalized 1-D Gaussian of radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable blur of a float plane with edge replication.
pub(crate) fn blur_plane(plane: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as i64;
    let mut tmp = vec![0.0; plane.len()];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let sx = (x as i64 + i as i64 - r).clamp(0, w as i64 - 1) as usize;
                acc += kv * row[sx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; plane.len()];
    for y in 0..h {
        for (i, kv) in k.iter().enumerate() {
            let sy = (y as i64 + i as i64 - r).clamp(0, h as i64 - 1) as usize;
            let src = &tmp[sy * w..(sy + 1) * w];
            let dst = &mut out[y * w..(y + 1) * w];
            for x in 0..w {
                dst[x] += kv * src[x];
            }
        }
    }
    out
}

/// Gaussian blur with edge replication; the radius is `ceil(3 sigma)`.
pub fn gaussian_blur(r: &Raster, sigma: f64) -> Result<Raster> {
    let (w, h, c) = r.dims();
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::param("gaussian_blur", "sigma", format!("must be positive, got {sigma}")));
    }
    if sigma > w.min(h) as f64 {
        return Err(Error::param("gaussian_blur", "sigma", format!("{sigma} exceeds min dimension {}", w.min(h))));
    }
    let mut out = vec![0u8; w * h * c];
    for ch in 0..c {
        let plane: Vec<f64> = r.samples().iter().skip(ch).step_by(c).map(|&v| v as f64).collect();
        let blurred = blur_plane(&plane, w, h, sigma);
        for (i, v) in blurred.into_iter().enumerate() {
            out[i * c + ch] = clamp_u8(v);
        }
    }
    Ok(r.with_samples(out))
}

/// Otsu level over a histogram: the `t` in 1..=255 maximizing between-class variance for the
/// split `v < t` / `v >= t`. Ties form a run of empty bins between the classes; the middle of
/// the first such run is returned. A single-valued histogram returns that value.
pub fn otsu_level(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    let occupied: Vec<usize> = (0..256).filter(|&i| hist[i] > 0).collect();
    if occupied.len() <= 1 {
        return occupied.first().copied().unwrap_or(0) as u8;
    }
    let sum_all: f64 = (0..256).map(|i| i as f64 * hist[i] as f64).sum();
    let mut n0 = 0u64;
    let mut s0 = 0.0;
    let mut scores = [f64::MIN; 256];
    for t in 1..256usize {
        n0 += hist[t - 1];
        s0 += (t - 1) as f64 * hist[t - 1] as f64;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        scores[t] = between_class_variance(n0 as f64, s0, n1 as f64, sum_all - s0);
    }
    plateau_middle(&scores)
}

/// Middle of the first run of maximal scores.
pub(crate) fn plateau_middle(scores: &[f64; 256]) -> u8 {
    let best = scores.iter().copied().fold(f64::MIN, f64::max);
    let first = scores.iter().position(|&s| s == best).unwrap_or(1);
    let last = first + scores[first..].iter().take_while(|&&s| s == best).count() - 1;
    ((first + last) / 2) as u8
}

#[inline]
pub(crate) fn between_class_variance(n0: f64, s0: f64, n1: f64, s1: f64) -> f64 {
    let d = s0 / n0 - s1 / n1;
    n0 * n1 * d * d
}

/// Otsu threshold on a single-channel raster. The mask is 255 for background (`v >= t`) and
/// 0 for foreground.
pub fn threshold_otsu(r: &Raster) -> Result<(u8, Raster)> {
    if r.channels() != 1 {
        return Err(Error::InvalidRaster("threshold_otsu requires a single-channel raster".into()));
    }
    let mut hist = [0u64; 256];
    r.samples().iter().for_each(|&v| hist[v as usize] += 1);
    let t = otsu_level(&hist);
    let mask = r.samples().iter().map(|&v| if v >= t { 255 } else { 0 }).collect();
    Ok((t, r.with_samples(mask)))
}

/// 3x3 majority vote on a binary single-channel mask (edges replicated).
pub fn majority3(mask: &Raster) -> Raster {
    let (w, h, _) = mask.dims();
    let s = mask.samples();
    let mut out = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut on = 0;
            for dy in -1i64..=1 {
                let sy = (y as i64 + dy).clamp(0, h as i64 - 1) as usize;
                for dx in -1i64..=1 {
                    let sx = (x as i64 + dx).clamp(0, w as i64 - 1) as usize;
                    if s[sy * w + sx] >= 128 {
                        on += 1;
                    }
                }
            }
            out[y * w + x] = if on >= 5 { 255 } else { 0 };
        }
    }
    mask.with_samples(out)
}

/// Sobel gradient magnitude of the luma plane, edges replicated.
pub fn sobel_magnitude(r: &Raster) -> Vec<f64> {
    let (w, h, _) = r.dims();
    let l = luma(r);
    let at = |x: i64, y: i64| -> f64 {
        let xx = x.clamp(0, w as i64 - 1) as usize;
        let yy = y.clamp(0, h as i64 - 1) as usize;
        l[yy * w + xx] as f64
    };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let gx = at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x - 1, y)
                - at(x - 1, y + 1);
            let gy = at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x, y - 1)
                - at(x + 1, y - 1);
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}
