use std::fs;

use anyhow::Context;
use docgrunge::raster::{encode, Format};
use docgrunge::Raster;

use crate::{read_image, Failure, PreviewArgs};

pub const GUTTER: usize = 8;
const SCALE: usize = 2;
/// Caption strip under each tile: glyph height plus 2 px above and below.
pub const CAPTION: usize = 5 * SCALE + 4;

/// 3x5 digit glyphs, one row per byte, bit 2 is the left column.
const DIGITS: [[u8; 5]; 10] = [
    [7, 5, 5, 5, 7],
    [2, 6, 2, 2, 7],
    [7, 1, 7, 4, 7],
    [7, 1, 7, 1, 7],
    [5, 5, 7, 1, 1],
    [7, 4, 7, 1, 7],
    [7, 4, 7, 5, 7],
    [7, 1, 1, 1, 1],
    [7, 5, 7, 5, 7],
    [7, 5, 7, 1, 7],
];

/// Columns and rows of the grid for `n` tiles.
pub fn grid(n: usize) -> (usize, usize) {
    let cols = (1..=n).find(|c| c * c >= n).unwrap_or(1);
    (cols, n.div_ceil(cols))
}

/// Sheet size for `n` tiles of `w` x `h`.
pub fn sheet_dims(n: usize, w: usize, h: usize) -> (usize, usize) {
    let (cols, rows) = grid(n);
    (cols * w + (cols + 1) * GUTTER, rows * (h + CAPTION) + (rows + 1) * GUTTER)
}

fn draw_number(sheet: &mut Raster, x0: usize, y0: usize, value: u64) {
    for (i, ch) in value.to_string().bytes().enumerate() {
        let glyph = DIGITS[(ch - b'0') as usize];
        let gx = x0 + i * 4 * SCALE;
        for (row, bits) in glyph.iter().enumerate() {
            for col in 0..3 {
                if bits >> (2 - col) & 1 == 0 {
                    continue;
                }
                for dy in 0..SCALE {
                    for dx in 0..SCALE {
                        let (x, y) = (gx + col * SCALE + dx, y0 + row * SCALE + dy);
                        if x < sheet.width() && y < sheet.height() {
                            sheet.pixel_mut(x, y).fill(0);
                        }
                    }
                }
            }
        }
    }
}

/// Tiles the variants row-major with their seeds captioned below. Smaller tiles sit top-left in
/// their cell on white.
pub fn contact_sheet(variants: &[(u64, Raster)]) -> Raster {
    let n = variants.len();
    let tw = variants.iter().map(|(_, r)| r.width()).max().unwrap_or(0);
    let th = variants.iter().map(|(_, r)| r.height()).max().unwrap_or(0);
    let c = if variants.iter().any(|(_, r)| r.channels() == 3) { 3 } else { 1 };
    let (cols, _) = grid(n);
    let (sw, sh) = sheet_dims(n, tw, th);
    let mut sheet = Raster::filled(sw, sh, c, 255);
    for (i, (seed, tile)) in variants.iter().enumerate() {
        let tile = tile.with_channels(c);
        let x0 = GUTTER + (i % cols) * (tw + GUTTER);
        let y0 = GUTTER + (i / cols) * (th + CAPTION + GUTTER);
        for y in 0..tile.height() {
            for x in 0..tile.width() {
                sheet.pixel_mut(x0 + x, y0 + y).copy_from_slice(tile.pixel(x, y));
            }
        }
        draw_number(&mut sheet, x0, y0 + th + 2, *seed);
    }
    sheet
}

pub fn run(args: &PreviewArgs) -> Result<(), Failure> {
    if args.n < 1 {
        return Err(Failure::Config("-n must be at least 1".into()));
    }
    let spec = args.spec.load()?;
    let img = read_image(&args.input)?;
    let variants = (0..args.n as u64)
        .map(|k| {
            let seed = spec.seed.wrapping_add(k);
            spec.run_seeded(&img, seed).map(|o| (seed, o.output))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Fatal(e.into()))?;
    let bytes = encode(&contact_sheet(&variants), Format::Png).context("encode sheet")?;
    fs::write(&args.output, bytes).with_context(|| args.output.display().to_string())?;
    Ok(())
}
