//! Compositing and procedural mask generation shared by the effect catalog.

mod blend;
mod mask;
mod noise;

pub use blend::{blend, Anchor, BlendMode, Placement};
pub(crate) use blend::blend_at;
pub use mask::{extract_foreground, ink_mask, ink_threshold};
pub use noise::{make_blob_mask, value_noise, BlobParams};
