use std::io::Cursor;

use image::codecs::jpeg::JpegEncoder;
use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};
use serde::{Deserialize, Serialize};

use super::Raster;
use crate::error::{Error, Result};

/// Output codec. JPEG quality is clamped into 1..=100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "codec")]
pub enum Format {
    Png,
    Jpeg { quality: u8 },
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Png => "png",
            Format::Jpeg { .. } => "jpg",
        }
    }
}

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

/// Decodes a PNG or baseline JPEG stream. Alpha is dropped; 16-bit PNGs are reduced to 8 bits.
pub fn decode(bytes: &[u8]) -> Result<Raster> {
    let format = image::guess_format(bytes).map_err(|_| {
        if bytes.is_empty() {
            Error::Decode { offset: 0, reason: "empty stream".into() }
        } else {
            Error::UnsupportedFormat("unrecognized signature".into())
        }
    })?;
    match format {
        ImageFormat::Png | ImageFormat::Jpeg => {}
        other => return Err(Error::UnsupportedFormat(format!("{other:?}"))),
    }
    let img = image::load_from_memory_with_format(bytes, format).map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::UnsupportedFormat(u.to_string()),
        other => {
            let offset = match format {
                ImageFormat::Png => png_fault_offset(bytes),
                _ => jpeg_fault_offset(bytes),
            };
            Error::Decode { offset, reason: other.to_string() }
        }
    })?;
    from_dynamic(img)
}

fn from_dynamic(img: DynamicImage) -> Result<Raster> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if img.color().has_color() {
        Raster::new(w, h, 3, img.into_rgb8().into_raw())
    } else {
        Raster::new(w, h, 1, img.into_luma8().into_raw())
    }
}

/// Walks PNG chunk framing and CRCs; returns the offset of the first structurally bad chunk,
/// or the first IDAT when the framing is intact (the fault is then inside compressed data).
fn png_fault_offset(bytes: &[u8]) -> usize {
    if bytes.len() < 8 || bytes[..8] != PNG_SIGNATURE {
        return 0;
    }
    let mut pos = 8;
    let mut first_idat = None;
    while pos < bytes.len() {
        if pos + 8 > bytes.len() {
            return pos;
        }
        let len = u32::from_be_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize;
        let kind = &bytes[pos + 4..pos + 8];
        let end = pos + 8 + len + 4;
        if end > bytes.len() {
            return pos;
        }
        let crc = u32::from_be_bytes(bytes[end - 4..end].try_into().unwrap());
        if crc32fast::hash(&bytes[pos + 4..end - 4]) != crc {
            return pos;
        }
        if kind == b"IDAT" && first_idat.is_none() {
            first_idat = Some(pos);
        }
        if kind == b"IEND" {
            return first_idat.unwrap_or(pos);
        }
        pos = end;
    }
    // Stream ended without IEND.
    bytes.len()
}

/// Walks JPEG marker segments up to the start of scan.
fn jpeg_fault_offset(bytes: &[u8]) -> usize {
    if bytes.len() < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8 {
        return 0;
    }
    let mut pos = 2;
    while pos + 4 <= bytes.len() {
        if bytes[pos] != 0xFF {
            return pos;
        }
        let marker = bytes[pos + 1];
        let len = u16::from_be_bytes([bytes[pos + 2], bytes[pos + 3]]) as usize;
        if len < 2 || pos + 2 + len > bytes.len() {
            return pos;
        }
        if marker == 0xDA {
            // Entropy-coded data follows; a truncated tail is the usual culprit.
            return bytes.len();
        }
        pos += 2 + len;
    }
    pos
}

pub fn encode(r: &Raster, format: Format) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let color = if r.channels() == 1 { ExtendedColorType::L8 } else { ExtendedColorType::Rgb8 };
    let (w, h) = (r.width() as u32, r.height() as u32);
    match format {
        Format::Png => PngEncoder::new(&mut out)
            .write_image(r.samples(), w, h, color)
            .map_err(|e| Error::Encode(e.to_string()))?,
        Format::Jpeg { quality } => {
            JpegEncoder::new_with_quality(Cursor::new(&mut out), quality.clamp(1, 100))
                .write_image(r.samples(), w, h, color)
                .map_err(|e| Error::Encode(e.to_string()))?
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn white_png_decodes_to_rgb() {
        let img = image::RgbImage::from_pixel(2, 2, image::Rgb([255, 255, 255]));
        let mut bytes = Vec::new();
        img.write_to(&mut Cursor::new(&mut bytes), ImageFormat::Png).unwrap();
        let r = decode(&bytes).unwrap();
        assert_eq!(r.dims(), (2, 2, 3));
        assert!(r.samples().iter().all(|&v| v == 255));
    }

    #[test]
    fn gray_ramp_stays_single_channel() {
        // Reference codec writes the ramp; we only read it back.
        let ramp = image::GrayImage::from_fn(256, 1, |x, _| image::Luma([x as u8]));
        let mut bytes = Vec::new();
        ramp.write_to(&mut Cursor::new(&mut bytes), ImageFormat::Png).unwrap();
        let r = decode(&bytes).unwrap();
        assert_eq!(r.channels(), 1);
        assert!(r.samples().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.samples(), ramp.as_raw().as_slice());
    }

    #[test]
    fn sixteen_bit_png_is_reduced() {
        let img = image::ImageBuffer::<image::Luma<u16>, _>::from_fn(4, 1, |x, _| image::Luma([x as u16 * 0x4000]));
        let mut bytes = Vec::new();
        DynamicImage::ImageLuma16(img).write_to(&mut Cursor::new(&mut bytes), ImageFormat::Png).unwrap();
        let r = decode(&bytes).unwrap();
        // 0xC000 / 257 = 191.25
        assert_eq!(r.samples(), &[0, 64, 128, 191]);
    }

    #[test]
    fn corrupt_crc_reports_chunk_offset() {
        let mut bytes = encode(&Raster::filled(4, 4, 1, 9), Format::Png).unwrap();
        // IHDR starts right after the signature; damage its payload.
        bytes[16] ^= 0xFF;
        match decode(&bytes) {
            Err(Error::Decode { offset, .. }) => assert_eq!(offset, 8),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_png_is_decode_error() {
        let bytes = encode(&Raster::filled(16, 16, 3, 40), Format::Png).unwrap();
        let cut = &bytes[..bytes.len() - 20];
        assert!(matches!(decode(cut), Err(Error::Decode { .. })));
    }

    #[test]
    fn foreign_format_is_unsupported() {
        let mut bytes = b"BM".to_vec();
        bytes.resize(64, 0);
        assert!(matches!(decode(&bytes), Err(Error::UnsupportedFormat(_))));
    }

    proptest! {
        #[test]
        fn png_round_trip_is_exact(w in 1usize..12, h in 1usize..12, rgb in any::<bool>(), seed in any::<u64>()) {
            let c = if rgb { 3 } else { 1 };
            let mut s = seed;
            let samples = (0..w * h * c).map(|_| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 56) as u8 }).collect();
            let r = Raster::new(w, h, c, samples).unwrap();
            let back = decode(&encode(&r, Format::Png).unwrap()).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
