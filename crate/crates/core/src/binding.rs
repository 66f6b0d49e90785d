//! Surface consumed by language bindings: spec loading and single-buffer augmentation.
//!
//! Buffers follow the usual n-dimensional array interface: a type string, an `H x W x C` shape
//! and optional byte strides (`None` means C-contiguous).

use std::path::PathBuf;
use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::pipeline::{self, PipelineSpec};
use crate::raster::Raster;

/// Borrowed view of a caller's sample buffer.
#[derive(Debug, Clone, Copy)]
pub struct ArrayView<'a> {
    pub data: &'a [u8],
    /// Element type in array-interface notation; only `|u1` (or `u1`, `uint8`) is accepted.
    pub typestr: &'a str,
    pub shape: &'a [usize],
    pub strides: Option<&'a [isize]>,
}

impl<'a> ArrayView<'a> {
    pub fn contiguous(data: &'a [u8], shape: &'a [usize]) -> Self {
        Self { data, typestr: "|u1", shape, strides: None }
    }

    /// Height, width and channels of a valid buffer. A 2-D shape is read as one channel.
    fn check(&self) -> Result<(usize, usize, usize)> {
        if !matches!(self.typestr, "|u1" | "u1" | "uint8" | "<u1" | ">u1") {
            return Err(Error::Buffer(format!("expected an 8-bit unsigned buffer, got {:?}", self.typestr)));
        }
        let (h, w, c) = match *self.shape {
            [h, w] => (h, w, 1),
            [h, w, c] => (h, w, c),
            _ => return Err(Error::Buffer(format!("expected an H x W x C array, got shape {:?}", self.shape))),
        };
        if c != 1 && c != 3 {
            return Err(Error::Buffer(format!("expected 1 or 3 channels, got {c}")));
        }
        if let Some(strides) = self.strides {
            let want: Vec<isize> = if self.shape.len() == 2 { vec![w as isize, 1] } else { vec![(w * c) as isize, c as isize, 1] };
            if strides != want.as_slice() {
                return Err(Error::Buffer(format!("buffer is not C-contiguous: strides {strides:?}, expected {want:?}")));
            }
        }
        if self.data.len() != h * w * c {
            return Err(Error::Buffer(format!("buffer holds {} bytes, shape needs {}", self.data.len(), h * w * c)));
        }
        Ok((h, w, c))
    }
}

/// Freshly allocated `H x W x C` output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnedArray {
    pub data: Vec<u8>,
    pub shape: [usize; 3],
}

impl OwnedArray {
    pub fn into_raster(self) -> Raster {
        let [h, w, c] = self.shape;
        Raster::new(w, h, c, self.data).expect("shape matches data")
    }
}

/// Validated, immutable pipeline handle. Cheap to clone and safe to share across threads.
#[derive(Debug, Clone)]
pub struct BoundPipeline {
    spec: Arc<PipelineSpec>,
    pub seed: u64,
}

impl BoundPipeline {
    pub fn new(spec: PipelineSpec) -> Self {
        let seed = spec.seed;
        Self { spec: Arc::new(spec), seed }
    }

    pub fn spec(&self) -> &PipelineSpec {
        &self.spec
    }

    /// Runs the pipeline on a borrowed buffer. `seed` defaults to the handle's base seed.
    /// Returns the output array and a provenance document with `seed`, `digest` and `log`.
    pub fn augment(&self, buffer: ArrayView<'_>, seed: Option<u64>) -> Result<(OwnedArray, String)> {
        let (h, w, c) = buffer.check()?;
        let img = Raster::new(w, h, c, buffer.data.to_vec())?;
        let seed = seed.unwrap_or(self.seed);
        let out = self.spec.run_seeded(&img, seed)?;
        let provenance = json!({ "seed": seed, "digest": out.log.digest(), "log": out.log.to_value() });
        let (ow, oh, oc) = out.output.dims();
        let array = OwnedArray { data: out.output.into_samples(), shape: [oh, ow, oc] };
        Ok((array, serde_json::to_string(&provenance).expect("log serialises")))
    }
}

/// A built-in spec name or JSON spec text; errors are the core validation errors unchanged.
pub fn load_pipeline(name_or_json: &str) -> Result<BoundPipeline> {
    load_pipeline_with_textures(name_or_json, None)
}

pub fn load_pipeline_with_textures(name_or_json: &str, texture_dir: Option<PathBuf>) -> Result<BoundPipeline> {
    pipeline::load_spec(name_or_json, texture_dir).map(BoundPipeline::new)
}

pub fn default_pipeline() -> BoundPipeline {
    BoundPipeline::new(pipeline::default_pipeline(None))
}

pub fn augment(bp: &BoundPipeline, buffer: ArrayView<'_>, seed: Option<u64>) -> Result<(OwnedArray, String)> {
    bp.augment(buffer, seed)
}
