use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{luma, Raster};

pub const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricReport {
    pub rmse: f64,
    /// `f64::INFINITY` for identical images; serialised as the string `"inf"`.
    #[serde(serialize_with = "ser_db")]
    pub psnr: f64,
    pub ssim: f64,
}

fn ser_db<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

impl MetricReport {
    pub fn compare(a: &Raster, b: &Raster) -> Result<Self> {
        let rmse = rmse(a, b)?;
        Ok(Self { rmse, psnr: psnr_from_rmse(rmse), ssim: ssim(a, b)? })
    }
}

fn same_dims(a: &Raster, b: &Raster) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch { left: a.dims(), right: b.dims() });
    }
    Ok(())
}

/// Root mean square difference over every sample.
pub fn rmse(a: &Raster, b: &Raster) -> Result<f64> {
    same_dims(a, b)?;
    let n = a.samples().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sum: u64 = a.samples().iter().zip(b.samples()).map(|(&x, &y)| (x as i64 - y as i64).pow(2) as u64).sum();
    Ok((sum as f64 / n as f64).sqrt())
}

pub fn psnr_from_rmse(rmse: f64) -> f64 {
    if rmse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (255.0 / rmse).log10()
    }
}

pub fn psnr(a: &Raster, b: &Raster) -> Result<f64> {
    rmse(a, b).map(psnr_from_rmse)
}

/// Normalised 1-D Gaussian taps; the 2-D window is their outer product.
pub fn ssim_window() -> [f64; SSIM_WINDOW] {
    let c = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0; SSIM_WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Valid-mode separable filter of a `w`x`h` plane.
fn filter_valid(plane: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let line = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = k.iter().zip(&line[x..x + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = k.iter().enumerate().map(|(i, a)| a * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Mean SSIM on luma over all valid 11x11 Gaussian windows (sigma 1.5, K1 0.01, K2 0.03, L 255).
pub fn ssim(a: &Raster, b: &Raster) -> Result<f64> {
    same_dims(a, b)?;
    let (w, h, _) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::InvalidRaster(format!("ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {w}x{h}")));
    }
    let la: Vec<f64> = luma(a).into_iter().map(f64::from).collect();
    let lb: Vec<f64> = luma(b).into_iter().map(f64::from).collect();
    let k = ssim_window();
    let prod = |f: fn(f64, f64) -> f64| la.iter().zip(&lb).map(|(&x, &y)| f(x, y)).collect::<Vec<_>>();
    let mu_a = filter_valid(&la, w, h, &k);
    let mu_b = filter_valid(&lb, w, h, &k);
    let aa = filter_valid(&prod(|x, _| x * x), w, h, &k);
    let bb = filter_valid(&prod(|_, y| y * y), w, h, &k);
    let ab = filter_valid(&prod(|x, y| x * y), w, h, &k);
    let n = mu_a.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = aa[i] - ma * ma;
            let vb = bb[i] - mb * mb;
            let cov = ab[i] - ma * mb;
            ((2.0 * ma * mb + C1) * (2.0 * cov + C2)) / ((ma * ma + mb * mb + C1) * (va + vb + C2))
        })
        .sum();
    Ok(total / n as f64)
}
