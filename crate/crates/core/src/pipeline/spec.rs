//! The declarative pipeline document and its JSON form.

use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::effect::{catalog, Effect, External};
use crate::effects::PaperFactory;
use crate::error::{Error, Result};
use crate::raster::Raster;

pub const SPEC_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Ink,
    Paper,
    Post,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Ink, Phase::Paper, Phase::Post];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Ink => "ink",
            Phase::Paper => "paper",
            Phase::Post => "post",
        }
    }

    pub(crate) fn id(self) -> u8 {
        self as u8
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One gated effect.
#[derive(Debug, Clone)]
pub struct EffectNode {
    pub effect: Arc<dyn Effect>,
    pub p: f64,
}

impl EffectNode {
    pub fn new(effect: impl Effect + 'static, p: f64) -> Self {
        Self { effect: Arc::new(effect), p }
    }

    pub fn kind(&self) -> &str {
        self.effect.kind()
    }

    fn to_json(&self) -> Value {
        json!({ "kind": self.kind(), "p": self.p, "params": self.effect.params_json() })
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    Effect(EffectNode),
    /// Gated as a whole; when it fires, one member is picked uniformly and applied regardless of its own `p`.
    OneOf { members: Vec<EffectNode>, p: f64 },
}

impl Node {
    pub fn effect(effect: impl Effect + 'static, p: f64) -> Self {
        Node::Effect(EffectNode::new(effect, p))
    }

    pub fn one_of(members: Vec<EffectNode>, p: f64) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Config("one_of group has no members".into()));
        }
        Ok(Node::OneOf { members, p })
    }

    pub fn p(&self) -> f64 {
        match self {
            Node::Effect(n) => n.p,
            Node::OneOf { p, .. } => *p,
        }
    }

    pub fn kind(&self) -> &str {
        match self {
            Node::Effect(n) => n.kind(),
            Node::OneOf { .. } => "one_of",
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Node::Effect(n) => n.to_json(),
            Node::OneOf { members, p } => json!({ "one_of": members.iter().map(EffectNode::to_json).collect::<Vec<_>>(), "p": p }),
        }
    }
}

/// Wraps a caller-supplied transform as a gated node logged under kind `external`.
pub fn wrap_external(
    label: impl Into<String>,
    f: impl Fn(&Raster) -> std::result::Result<Raster, String> + Send + Sync + 'static,
    p: f64,
) -> Node {
    Node::effect(External::new(label, f), p)
}

#[derive(Debug, Clone, Default)]
pub struct PipelineSpec {
    pub ink: Vec<Node>,
    pub paper: Vec<Node>,
    pub post: Vec<Node>,
    pub texture_dir: Option<PathBuf>,
    pub seed: u64,
    pub save_intermediates: bool,
}

impl PipelineSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn phase(&self, phase: Phase) -> &[Node] {
        match phase {
            Phase::Ink => &self.ink,
            Phase::Paper => &self.paper,
            Phase::Post => &self.post,
        }
    }

    pub fn phase_mut(&mut self, phase: Phase) -> &mut Vec<Node> {
        match phase {
            Phase::Ink => &mut self.ink,
            Phase::Paper => &mut self.paper,
            Phase::Post => &mut self.post,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ink.len() + self.paper.len() + self.post.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_with_textures(text, None)
    }

    /// Parses `text`, using `fallback` when the document has no `texture_dir`.
    pub fn from_json_with_textures(text: &str, fallback: Option<PathBuf>) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| json_error(text, &e))?;
        if let (Some(dir), Some(obj)) = (fallback, value.as_object_mut()) {
            if obj.get("texture_dir").is_none_or(Value::is_null) {
                obj.insert("texture_dir".into(), Value::String(dir.to_string_lossy().into_owned()));
            }
        }
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| spec_err("", "document must be a JSON object"))?;
        let mut spec = PipelineSpec::default();
        for (key, v) in obj {
            let ptr = format!("/{}", escape(key));
            match key.as_str() {
                "spec_version" => {
                    if v.as_u64() != Some(SPEC_VERSION) {
                        return Err(spec_err(&ptr, format!("unsupported version {v}, expected {SPEC_VERSION}")));
                    }
                }
                "seed" => spec.seed = v.as_u64().ok_or_else(|| spec_err(&ptr, "must be an unsigned 64-bit integer"))?,
                "save_intermediates" => spec.save_intermediates = v.as_bool().ok_or_else(|| spec_err(&ptr, "must be a boolean"))?,
                "texture_dir" => {
                    spec.texture_dir = match v {
                        Value::Null => None,
                        Value::String(s) => Some(PathBuf::from(s)),
                        _ => return Err(spec_err(&ptr, "must be a string or null")),
                    }
                }
                "ink" | "paper" | "post" => {}
                _ => return Err(spec_err(&ptr, "unknown key")),
            }
        }
        for phase in Phase::ALL {
            let Some(v) = obj.get(phase.name()) else { continue };
            let ptr = format!("/{}", phase.name());
            let items = v.as_array().ok_or_else(|| spec_err(&ptr, "must be an array of nodes"))?;
            for (i, item) in items.iter().enumerate() {
                let node = parse_node(item, &format!("{ptr}/{i}"), spec.texture_dir.as_ref())?;
                spec.phase_mut(phase).push(node);
            }
        }
        Ok(spec)
    }

    pub fn to_value(&self) -> Value {
        let phase = |nodes: &[Node]| Value::Array(nodes.iter().map(Node::to_json).collect());
        json!({
            "spec_version": SPEC_VERSION,
            "seed": self.seed,
            "texture_dir": self.texture_dir.as_ref().map(|p| p.to_string_lossy().into_owned()),
            "save_intermediates": self.save_intermediates,
            "ink": phase(&self.ink),
            "paper": phase(&self.paper),
            "post": phase(&self.post),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("spec serializes")
    }
}

fn parse_node(item: &Value, ptr: &str, texture_dir: Option<&PathBuf>) -> Result<Node> {
    let obj = item.as_object().ok_or_else(|| spec_err(ptr, "node must be an object"))?;
    let p = parse_p(obj, ptr)?;
    if let Some(group) = obj.get("one_of") {
        if let Some(key) = obj.keys().find(|k| !matches!(k.as_str(), "one_of" | "p")) {
            return Err(spec_err(&format!("{ptr}/{}", escape(key)), "unknown key"));
        }
        let gptr = format!("{ptr}/one_of");
        let members = group.as_array().ok_or_else(|| spec_err(&gptr, "must be an array of nodes"))?;
        if members.is_empty() {
            return Err(spec_err(&gptr, "one_of group has no members"));
        }
        let members = members
            .iter()
            .enumerate()
            .map(|(j, m)| parse_effect(m, &format!("{gptr}/{j}"), texture_dir))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Node::OneOf { members, p });
    }
    Ok(Node::Effect(parse_effect(item, ptr, texture_dir)?))
}

fn parse_p(obj: &Map<String, Value>, ptr: &str) -> Result<f64> {
    match obj.get("p") {
        None => Ok(1.0),
        Some(v) => match v.as_f64() {
            Some(p) if (0.0..=1.0).contains(&p) => Ok(p),
            _ => Err(spec_err(&format!("{ptr}/p"), "must be a number in [0, 1]")),
        },
    }
}

fn parse_effect(item: &Value, ptr: &str, texture_dir: Option<&PathBuf>) -> Result<EffectNode> {
    let obj = item.as_object().ok_or_else(|| spec_err(ptr, "node must be an object"))?;
    if let Some(key) = obj.keys().find(|k| !matches!(k.as_str(), "kind" | "p" | "params")) {
        return Err(spec_err(&format!("{ptr}/{}", escape(key)), "unknown key"));
    }
    let p = parse_p(obj, ptr)?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| spec_err(&format!("{ptr}/kind"), "missing effect kind"))?;
    let reg = catalog().get(kind)?;
    let mut params = obj.get("params").cloned().unwrap_or(Value::Null);
    if kind == <PaperFactory as crate::effect::EffectParams>::KIND {
        let map = match &mut params {
            Value::Null => {
                params = Value::Object(Map::new());
                params.as_object_mut().expect("just built")
            }
            Value::Object(m) => m,
            _ => return Err(spec_err(&format!("{ptr}/params"), "must be an object")),
        };
        if map.get("texture_dir").is_none_or(Value::is_null) {
            let dir = texture_dir.ok_or_else(|| spec_err(&format!("{ptr}/params/texture_dir"), "paper_factory needs texture_dir in the node or the spec"))?;
            map.insert("texture_dir".into(), Value::String(dir.to_string_lossy().into_owned()));
        }
    }
    let effect = reg.build(&params).map_err(|e| match e {
        Error::Param { field, reason, .. } => spec_err(&format!("{ptr}/params{}", field_pointer(&field)), reason),
        other => spec_err(&format!("{ptr}/params"), other.to_string()),
    })?;
    Ok(EffectNode { effect: Arc::from(effect), p })
}

/// `a.b[2]` style field paths to JSON pointer suffixes.
fn field_pointer(field: &str) -> String {
    if field.is_empty() || field == "params" {
        return String::new();
    }
    let mut out = String::new();
    for part in field.split('.') {
        let mut rest = part;
        if let Some(b) = rest.find('[') {
            out.push('/');
            out.push_str(&escape(&rest[..b]));
            rest = &rest[b..];
            for idx in rest.split('[').filter(|s| !s.is_empty()) {
                out.push('/');
                out.push_str(idx.trim_end_matches(']'));
            }
        } else {
            out.push('/');
            out.push_str(&escape(rest));
        }
    }
    out
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn spec_err(pointer: &str, reason: impl Into<String>) -> Error {
    Error::Spec { pointer: pointer.to_string(), reason: reason.into() }
}

/// Converts a parser error's line/column into a byte offset into `text`.
fn json_error(text: &str, e: &serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let offset = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + column.saturating_sub(1);
    Error::Json { offset: offset.min(text.len()), line, column, reason: e.to_string() }
}
