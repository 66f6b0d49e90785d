use crate::raster::{luma, majority3, threshold_otsu, Raster};

/// Luma threshold below which a pixel counts as ink: Otsu's level capped at 128, or plain 128
/// when the page is a single tone.
pub fn ink_threshold(img: &Raster) -> u8 {
    let gray = img.to_gray();
    if gray.is_constant() {
        return 128;
    }
    let (t, _) = threshold_otsu(&gray).expect("gray raster");
    t.min(128)
}

/// Per-pixel ink flags (`luma < ink_threshold`).
pub fn ink_mask(img: &Raster) -> Vec<bool> {
    let t = ink_threshold(img);
    luma(img).into_iter().map(|v| v < t).collect()
}

/// Lifts the printed foreground off a clean page.
///
/// Returns the ink layer (the document where the mask is set, white elsewhere) and a binary
/// mask with 255 marking foreground. Otsu on luma, then a 3x3 majority filter; foreground pixels
/// touching a pixel that survives the vote are restored, so speckle goes but glyph corners stay.
pub fn extract_foreground(doc: &Raster) -> (Raster, Raster) {
    let gray = doc.to_gray();
    let (w, h, _) = gray.dims();
    let (_, background) = threshold_otsu(&gray).expect("gray raster");
    let fg: Vec<u8> = background.samples().iter().map(|&v| 255 - v).collect();
    let voted = majority3(&gray.with_samples(fg.clone()));
    let v = voted.samples();
    let kept = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            let near = (y.saturating_sub(1)..=(y + 1).min(h - 1))
                .any(|ny| (x.saturating_sub(1)..=(x + 1).min(w - 1)).any(|nx| v[ny * w + nx] == 255));
            if fg[i] == 255 && near { 255 } else { 0 }
        })
        .collect();
    let mask = voted.with_samples(kept);
    let c = doc.channels();
    let mut ink = doc.clone();
    for (i, &m) in mask.samples().iter().enumerate() {
        if m == 0 {
            ink.samples_mut()[i * c..(i + 1) * c].fill(255);
        }
    }
    (ink, mask)
}
