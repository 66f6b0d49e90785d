//! Three-phase, probability-gated execution with provenance.

mod run;
mod spec;

use std::path::PathBuf;
use std::sync::Arc;

pub use run::{apply_sequence, compose_pipelines, gate, one_of, print, run, AugmentationResult, ComposedOutput, ComposedPipeline, PipelineLog, PipelineOutput};
pub use spec::{wrap_external, EffectNode, Node, Phase, PipelineSpec, SPEC_VERSION};

use crate::effect::catalog;
use crate::effects::PaperFactory;
use crate::error::Result;

/// Gate probability of every node in the built-in default pipeline.
pub const DEFAULT_P: f64 = 0.3;

pub const DEFAULT_INK: [&str; 4] = ["bleed_through", "low_ink_lines", "ink_bleed", "letterpress"];
pub const DEFAULT_PAPER: [&str; 7] =
    ["color_paper", "watermark", "gamma", "lighting_gradient", "subtle_noise", "brightness_texturize", "noise_texturize"];
pub const DEFAULT_POST: [&str; 13] = [
    "dirty_drum",
    "dirty_rollers",
    "bad_photocopy",
    "markup",
    "pencil_scribbles",
    "folding",
    "book_binding",
    "bindings_and_fasteners",
    "geometric",
    "dithering",
    "faxify",
    "page_border",
    "jpeg",
];

fn default_node(kind: &str) -> Node {
    let reg = catalog().get(kind).expect("default kinds are registered");
    Node::Effect(EffectNode { effect: Arc::from(reg.default_effect()), p: DEFAULT_P })
}

/// Every catalog effect once, at its default parameters and `p = 0.3`. The paper factory joins
/// the paper phase (first, since it replaces the sheet) only when a texture directory is given.
pub fn default_pipeline(texture_dir: Option<PathBuf>) -> PipelineSpec {
    let mut paper: Vec<Node> = Vec::new();
    if let Some(dir) = &texture_dir {
        paper.push(Node::effect(PaperFactory::new(dir.clone()), DEFAULT_P));
    }
    paper.extend(DEFAULT_PAPER.iter().map(|k| default_node(k)));
    PipelineSpec {
        ink: DEFAULT_INK.iter().map(|k| default_node(k)).collect(),
        paper,
        post: DEFAULT_POST.iter().map(|k| default_node(k)).collect(),
        texture_dir,
        seed: 0,
        save_intermediates: false,
    }
}

/// Names accepted wherever a spec document is expected.
pub const BUILTIN_SPECS: [&str; 2] = ["default", "empty"];

pub fn builtin(name: &str, texture_dir: Option<PathBuf>) -> Option<PipelineSpec> {
    match name {
        "default" => Some(default_pipeline(texture_dir)),
        "empty" => Some(PipelineSpec { texture_dir, ..PipelineSpec::empty() }),
        _ => None,
    }
}

/// A built-in name, or JSON spec text. `texture_dir` fills in a missing or null `texture_dir`.
pub fn load_spec(name_or_json: &str, texture_dir: Option<PathBuf>) -> Result<PipelineSpec> {
    match builtin(name_or_json.trim(), texture_dir.clone()) {
        Some(spec) => Ok(spec),
        None => PipelineSpec::from_json_with_textures(name_or_json, texture_dir),
    }
}
