//! The effect trait and the registry that maps `kind` strings to implementations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::effects;
use crate::error::{Error, Result};
use crate::raster::Raster;
use crate::rng::StreamRng;

/// Catalog column an effect belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ink,
    Paper,
    Post,
    Multiple,
}

/// A configured augmentation, ready to run. Gating is the pipeline's job, not the effect's.
pub trait Effect: Send + Sync + fmt::Debug {
    fn kind(&self) -> &str;

    /// Parameters as they would appear in a spec document.
    fn params_json(&self) -> Value;

    /// Draws every ranged parameter, yielding a fully fixed copy.
    fn resolve(&self, rng: &mut StreamRng) -> Box<dyn Effect>;

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster>;
}

/// Typed parameter record for one catalog effect. Every record doubles as its effect.
pub trait EffectParams: Clone + Default + fmt::Debug + Serialize + DeserializeOwned + Send + Sync + 'static {
    const KIND: &'static str;
    const FAMILY: Family;

    fn validate(&self) -> Result<()>;

    /// Post-deserialization hook; loads external assets. Defaults to `validate`.
    fn prepare(&mut self) -> Result<()> {
        self.validate()
    }

    fn resolve(&self, _rng: &mut StreamRng) -> Self {
        self.clone()
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster>;

    /// Parameters at which the effect is a bit-exact no-op, if such a setting exists.
    fn identity() -> Option<Self>;
}

impl<P: EffectParams> Effect for P {
    fn kind(&self) -> &str {
        P::KIND
    }

    fn params_json(&self) -> Value {
        serde_json::to_value(self).expect("parameter records serialize")
    }

    fn resolve(&self, rng: &mut StreamRng) -> Box<dyn Effect> {
        Box::new(EffectParams::resolve(self, rng))
    }

    fn apply(&self, img: &Raster, rng: &mut StreamRng) -> Result<Raster> {
        EffectParams::apply(self, img, rng)
    }
}

type Builder = fn(&Value) -> Result<Box<dyn Effect>>;
type Maker = fn() -> Box<dyn Effect>;
type MaybeMaker = fn() -> Option<Box<dyn Effect>>;

#[derive(Clone, Copy)]
pub struct Registration {
    pub kind: &'static str,
    pub family: Family,
    build: Builder,
    identity: MaybeMaker,
    default: Maker,
}

impl fmt::Debug for Registration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registration").field("kind", &self.kind).field("family", &self.family).finish()
    }
}

impl Registration {
    pub fn of<P: EffectParams>() -> Self {
        Self {
            kind: P::KIND,
            family: P::FAMILY,
            build: build_from_json::<P>,
            identity: || P::identity().map(|p| Box::new(p) as Box<dyn Effect>),
            default: || Box::new(P::default()),
        }
    }

    pub fn build(&self, params: &Value) -> Result<Box<dyn Effect>> {
        (self.build)(params)
    }

    pub fn identity(&self) -> Option<Box<dyn Effect>> {
        (self.identity)()
    }

    pub fn default_effect(&self) -> Box<dyn Effect> {
        (self.default)()
    }
}

fn build_from_json<P: EffectParams>(params: &Value) -> Result<Box<dyn Effect>> {
    let params = if params.is_null() { Value::Object(Default::default()) } else { params.clone() };
    let mut parsed: P = serde_path_to_error::deserialize(params).map_err(|e| {
        let field = e.path().to_string();
        Error::param(P::KIND, if field == "." { "params" } else { &field }, e.into_inner().to_string())
    })?;
    parsed.prepare()?;
    Ok(Box::new(parsed))
}

/// Name-indexed set of effect implementations.
#[derive(Debug, Default, Clone)]
pub struct Registry {
    entries: BTreeMap<&'static str, Registration>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, reg: Registration) -> &mut Self {
        self.entries.insert(reg.kind, reg);
        self
    }

    pub fn get(&self, kind: &str) -> Result<&Registration> {
        self.entries.get(kind).ok_or_else(|| Error::UnknownKind(kind.to_string()))
    }

    pub fn build(&self, kind: &str, params: &Value) -> Result<Box<dyn Effect>> {
        self.get(kind)?.build(params)
    }

    pub fn kinds(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Registration> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The built-in catalog.
pub fn catalog() -> &'static Registry {
    static CATALOG: OnceLock<Registry> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let mut r = Registry::new();
        effects::register_all(&mut r);
        r
    })
}

type Transform = Arc<dyn Fn(&Raster) -> std::result::Result<Raster, String> + Send + Sync>;

/// Wraps an arbitrary image transform so it can sit in a pipeline like a catalog effect.
#[derive(Clone)]
pub struct External {
    label: String,
    transform: Transform,
}

impl External {
    pub const KIND: &'static str = "external";

    pub fn new(label: impl Into<String>, f: impl Fn(&Raster) -> std::result::Result<Raster, String> + Send + Sync + 'static) -> Self {
        Self { label: label.into(), transform: Arc::new(f) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for External {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("External").field("label", &self.label).finish_non_exhaustive()
    }
}

impl Effect for External {
    fn kind(&self) -> &str {
        Self::KIND
    }

    fn params_json(&self) -> Value {
        serde_json::json!({ "label": self.label })
    }

    fn resolve(&self, _rng: &mut StreamRng) -> Box<dyn Effect> {
        Box::new(self.clone())
    }

    fn apply(&self, img: &Raster, _rng: &mut StreamRng) -> Result<Raster> {
        (self.transform)(img).map_err(|reason| Error::External { label: self.label.clone(), reason })
    }
}
