//! Executes a pipeline spec and records provenance.

use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

use super::spec::{EffectNode, Node, Phase, PipelineSpec};
use crate::error::{Error, Result};
use crate::raster::{resample, Filter, Raster};
use crate::rng::{StreamKey, StreamRng};
use crate::synthesis::BlendMode;

/// Provenance of one node's execution.
#[derive(Debug, Clone, Serialize)]
pub struct AugmentationResult {
    pub index: usize,
    pub kind: String,
    pub applied: bool,
    /// Resolved parameters when applied; the configured parameters otherwise.
    pub params: Value,
    pub p: f64,
    pub input_dims: [usize; 3],
    pub output_dims: [usize; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<AugmentationResult>,
    #[serde(skip)]
    pub duration: Duration,
    #[serde(skip)]
    pub intermediate: Option<Raster>,
}

fn dims(r: &Raster) -> [usize; 3] {
    let (w, h, c) = r.dims();
    [w, h, c]
}

/// Ordered results, grouped by phase.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PipelineLog {
    pub ink: Vec<AugmentationResult>,
    pub paper: Vec<AugmentationResult>,
    pub post: Vec<AugmentationResult>,
}

impl PipelineLog {
    pub fn phase(&self, phase: Phase) -> &[AugmentationResult] {
        match phase {
            Phase::Ink => &self.ink,
            Phase::Paper => &self.paper,
            Phase::Post => &self.post,
        }
    }

    fn phase_mut(&mut self, phase: Phase) -> &mut Vec<AugmentationResult> {
        match phase {
            Phase::Ink => &mut self.ink,
            Phase::Paper => &mut self.paper,
            Phase::Post => &mut self.post,
        }
    }

    /// Top-level entries across all phases.
    pub fn len(&self) -> usize {
        self.ink.len() + self.paper.len() + self.post.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entries(&self) -> impl Iterator<Item = (Phase, &AugmentationResult)> {
        Phase::ALL.into_iter().flat_map(move |p| self.phase(p).iter().map(move |r| (p, r)))
    }

    /// Timing-free JSON; identical across runs for identical inputs.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("log serializes")
    }

    /// Compact canonical text (object keys sorted) used for digests.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("log serializes")
    }

    pub fn digest(&self) -> String {
        crate::digest_hex(self.canonical().as_bytes())
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub output: Raster,
    pub log: PipelineLog,
    pub ink_layer: Option<Raster>,
    pub paper_layer: Option<Raster>,
    pub merged: Option<Raster>,
}

/// Gate decision: one uniform draw, apply iff it falls below `p`.
pub fn gate(p: f64, rng: &mut StreamRng) -> bool {
    rng.uniform() < p
}

/// Prints ink onto paper: per-channel multiply, the paper first resized to the ink's dimensions.
pub fn print(ink: &Raster, paper: &Raster) -> Result<Raster> {
    let paper = if (paper.width(), paper.height()) != (ink.width(), ink.height()) {
        resample(paper, ink.width(), ink.height(), Filter::Bilinear)?
    } else {
        paper.clone()
    };
    let c = ink.channels().max(paper.channels());
    let ink = ink.with_channels(c);
    let paper = paper.with_channels(c);
    let samples = ink.samples().iter().zip(paper.samples()).map(|(&i, &p)| BlendMode::Multiply.apply(i, p)).collect();
    Ok(ink.with_samples(samples))
}

fn run_member(node: &EffectNode, index: usize, img: &Raster, rng: &mut StreamRng, phase: Phase) -> Result<(Raster, Value)> {
    let resolved = node.effect.resolve(rng);
    let out = resolved.apply(img, rng).map_err(|e| Error::Effect {
        phase: phase.name().into(),
        index,
        kind: node.kind().into(),
        source: Box::new(e),
    })?;
    Ok((out, resolved.params_json()))
}

fn skipped(index: usize, node: &EffectNode, img: &Raster) -> AugmentationResult {
    AugmentationResult {
        index,
        kind: node.kind().into(),
        applied: false,
        params: node.effect.params_json(),
        p: node.p,
        input_dims: dims(img),
        output_dims: dims(img),
        chosen: None,
        members: Vec::new(),
        duration: Duration::ZERO,
        intermediate: None,
    }
}

/// Runs one phase's nodes in order, each on its own substream of `seed`.
pub fn apply_sequence(
    nodes: &[Node],
    img: &Raster,
    seed: u64,
    phase: Phase,
    save_intermediates: bool,
) -> Result<(Raster, Vec<AugmentationResult>)> {
    let mut cur = img.clone();
    let mut log = Vec::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        let start = Instant::now();
        let mut rng = StreamRng::new(seed, StreamKey::node(phase.id(), i));
        let mut result = match node {
            Node::Effect(n) => {
                let mut r = skipped(i, n, &cur);
                if gate(n.p, &mut rng) {
                    let (out, params) = run_member(n, i, &cur, &mut rng, phase)?;
                    r.applied = true;
                    r.params = params;
                    cur = out;
                }
                r
            }
            Node::OneOf { members, p } => one_of(members, *p, &cur, seed, phase, i).map(|(out, r)| {
                cur = out;
                r
            })?,
        };
        result.output_dims = dims(&cur);
        result.duration = start.elapsed();
        if save_intermediates {
            result.intermediate = Some(cur.clone());
        }
        log.push(result);
    }
    Ok((cur, log))
}

/// Gates the whole group, then applies one uniformly chosen member unconditionally.
pub fn one_of(members: &[EffectNode], p: f64, img: &Raster, seed: u64, phase: Phase, index: usize) -> Result<(Raster, AugmentationResult)> {
    if members.is_empty() {
        return Err(Error::Config("one_of group has no members".into()));
    }
    let mut rng = StreamRng::new(seed, StreamKey::node(phase.id(), index));
    let fired = gate(p, &mut rng);
    let chosen = fired.then(|| rng.index(members.len()));
    let mut out = img.clone();
    let mut results = Vec::with_capacity(members.len());
    for (j, m) in members.iter().enumerate() {
        let mut r = skipped(j, m, img);
        if chosen == Some(j) {
            let mut mrng = StreamRng::new(seed, StreamKey::member(phase.id(), index, j));
            let (o, params) = run_member(m, index, img, &mut mrng, phase)?;
            r.applied = true;
            r.params = params;
            r.output_dims = dims(&o);
            out = o;
        }
        results.push(r);
    }
    let result = AugmentationResult {
        index,
        kind: "one_of".into(),
        applied: fired,
        params: Value::Null,
        p,
        input_dims: dims(img),
        output_dims: dims(&out),
        chosen,
        members: results,
        duration: Duration::ZERO,
        intermediate: None,
    };
    Ok((out, result))
}

impl PipelineSpec {
    /// Runs with the spec's own seed.
    pub fn run(&self, img: &Raster) -> Result<PipelineOutput> {
        self.run_seeded(img, self.seed)
    }

    /// Ink phase on the image, paper phase on a white sheet, print, then post phase.
    pub fn run_seeded(&self, img: &Raster, seed: u64) -> Result<PipelineOutput> {
        let keep = self.save_intermediates;
        let mut log = PipelineLog::default();
        let (ink, l) = apply_sequence(&self.ink, img, seed, Phase::Ink, keep)?;
        *log.phase_mut(Phase::Ink) = l;
        let sheet = Raster::filled(img.width(), img.height(), img.channels(), 255);
        let (paper, l) = apply_sequence(&self.paper, &sheet, seed, Phase::Paper, keep)?;
        *log.phase_mut(Phase::Paper) = l;
        let merged = print(&ink, &paper)?;
        let (output, l) = apply_sequence(&self.post, &merged, seed, Phase::Post, keep)?;
        *log.phase_mut(Phase::Post) = l;
        let (ink_layer, paper_layer, merged) = if keep { (Some(ink), Some(paper), Some(merged)) } else { (None, None, None) };
        Ok(PipelineOutput { output, log, ink_layer, paper_layer, merged })
    }
}

/// Runs the given pipeline (the spec's seed applies) and returns only the image.
pub fn run(spec: &PipelineSpec, img: &Raster) -> Result<PipelineOutput> {
    spec.run(img)
}

/// Pipelines run back to back, each on the previous output.
#[derive(Debug, Clone, Default)]
pub struct ComposedPipeline {
    pub stages: Vec<(String, PipelineSpec)>,
}

#[derive(Debug, Clone)]
pub struct ComposedOutput {
    pub output: Raster,
    pub logs: Vec<(String, PipelineLog)>,
}

impl ComposedOutput {
    pub fn to_value(&self) -> Value {
        Value::Array(self.logs.iter().map(|(label, log)| json!({ "pipeline": label, "log": log.to_value() })).collect())
    }
}

impl ComposedPipeline {
    pub fn then(mut self, label: impl Into<String>, spec: PipelineSpec) -> Self {
        self.stages.push((label.into(), spec));
        self
    }

    pub fn run(&self, img: &Raster) -> Result<ComposedOutput> {
        let mut cur = img.clone();
        let mut logs = Vec::with_capacity(self.stages.len());
        for (label, spec) in &self.stages {
            let out = spec.run(&cur)?;
            cur = out.output;
            logs.push((label.clone(), out.log));
        }
        Ok(ComposedOutput { output: cur, logs })
    }
}

/// `b` after `a`, labelled `first` and `second` in the combined log.
pub fn compose_pipelines(a: PipelineSpec, b: PipelineSpec) -> ComposedPipeline {
    ComposedPipeline::default().then("first", a).then("second", b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::{Gamma, SubtleNoise};
    use crate::params::Sampled;
    use crate::pipeline::wrap_external;

    fn gamma(g: f64, p: f64) -> Node {
        Node::effect(Gamma { gamma: Sampled::Fixed(g) }, p)
    }

    #[test]
    fn gate_edges_and_rate() {
        let mut rng = StreamRng::seeded(0);
        assert!((0..1000).all(|_| !gate(0.0, &mut rng)));
        assert!((0..1000).all(|_| gate(1.0, &mut rng)));
        let hits = (0..10_000).filter(|_| gate(0.5, &mut rng)).count();
        assert!((4700..=5300).contains(&hits), "{hits}");
    }

    #[test]
    fn empty_and_skipped_sequences() {
        let img = crate::fixtures::text_page(40, 30, 2, 1);
        let (out, log) = apply_sequence(&[], &img, 1, Phase::Ink, false).unwrap();
        assert_eq!(out, img);
        assert!(log.is_empty());
        let (out, log) = apply_sequence(&[gamma(2.0, 0.0), gamma(0.5, 0.0)], &img, 1, Phase::Ink, true).unwrap();
        assert_eq!(out, img);
        assert_eq!(log.len(), 2);
        assert!(log.iter().all(|r| !r.applied && r.intermediate.as_ref() == Some(&img)));
    }

    #[test]
    fn reciprocal_gammas_nearly_cancel() {
        let img = Raster::filled(16, 16, 1, 128);
        let (out, _) = apply_sequence(&[gamma(2.0, 1.0), gamma(0.5, 1.0)], &img, 3, Phase::Paper, false).unwrap();
        assert!(out.samples().iter().all(|&v| v.abs_diff(128) <= 2));
    }

    #[test]
    fn one_of_choice_and_gate() {
        let img = Raster::filled(4, 4, 1, 128);
        let members = vec![
            EffectNode::new(Gamma { gamma: Sampled::Fixed(2.0) }, 0.0),
            EffectNode::new(Gamma { gamma: Sampled::Fixed(0.5) }, 0.0),
            EffectNode::new(Gamma { gamma: Sampled::Fixed(1.5) }, 0.0),
        ];
        let (out, r) = one_of(&members[..1], 1.0, &img, 0, Phase::Post, 0).unwrap();
        assert!(r.applied && r.members[0].applied);
        assert_eq!(out.samples()[0], 64);
        let (out, r) = one_of(&members, 0.0, &img, 0, Phase::Post, 0).unwrap();
        assert!(!r.applied && r.chosen.is_none());
        assert_eq!(out, img);
        let mut counts = [0usize; 3];
        for seed in 0..9000 {
            let (_, r) = one_of(&members, 1.0, &img, seed, Phase::Post, 0).unwrap();
            counts[r.chosen.unwrap()] += 1;
            assert_eq!(r.members.len(), 3);
            assert_eq!(r.members.iter().filter(|m| m.applied).count(), 1);
        }
        for c in counts {
            assert!((c as f64 / 9000.0 - 1.0 / 3.0).abs() <= 0.03, "{counts:?}");
        }
        assert!(one_of(&[], 1.0, &img, 0, Phase::Post, 0).is_err());
    }

    #[test]
    fn print_semantics() {
        let ink = crate::fixtures::text_page(30, 20, 2, 2);
        let white = Raster::filled(30, 20, 1, 255);
        let paper = Raster::from_fn_gray(30, 20, |x, y| (100 + x + y) as u8);
        assert_eq!(print(&ink, &white).unwrap(), ink);
        assert_eq!(print(&white, &paper).unwrap(), paper);
        let black = Raster::filled(30, 20, 1, 0);
        assert_eq!(print(&black, &paper).unwrap(), black);
        let small = Raster::filled(10, 5, 3, 255);
        assert_eq!(print(&ink, &small).unwrap(), ink.to_rgb());
    }

    #[test]
    fn empty_pipeline_is_identity_and_runs_are_deterministic() {
        let img = crate::fixtures::text_page(64, 48, 3, 3);
        assert_eq!(PipelineSpec::empty().run(&img).unwrap().output, img);
        let spec = PipelineSpec {
            ink: vec![gamma(1.3, 0.5)],
            paper: vec![Node::effect(SubtleNoise::default(), 1.0)],
            post: vec![gamma(0.9, 0.7)],
            seed: 11,
            ..Default::default()
        };
        let a = spec.run(&img).unwrap();
        let b = spec.run(&img).unwrap();
        assert_eq!(a.output, b.output);
        assert_eq!(a.log.canonical(), b.log.canonical());
        assert_eq!(a.log.len(), 3);
    }

    #[test]
    fn toggling_a_gate_leaves_other_draws_alone() {
        let img = Raster::filled(32, 32, 1, 200);
        let noise = |p| Node::effect(SubtleNoise::default(), p);
        let on = PipelineSpec { post: vec![noise(1.0), noise(1.0)], seed: 5, ..Default::default() };
        let off = PipelineSpec { post: vec![noise(0.0), noise(1.0)], seed: 5, ..Default::default() };
        let a = on.run(&img).unwrap().log;
        let b = off.run(&img).unwrap().log;
        assert_eq!(a.post[1].params, b.post[1].params);
    }

    #[test]
    fn composition_matches_sequential_runs() {
        let img = crate::fixtures::text_page(50, 40, 2, 4);
        let a = PipelineSpec { post: vec![Node::effect(SubtleNoise::default(), 1.0)], seed: 1, ..Default::default() };
        let b = PipelineSpec { post: vec![gamma(1.4, 1.0), Node::effect(SubtleNoise::default(), 0.5)], seed: 2, ..Default::default() };
        let composed = compose_pipelines(a.clone(), b.clone()).run(&img).unwrap();
        let direct = b.run(&a.run(&img).unwrap().output).unwrap();
        assert_eq!(composed.output, direct.output);
        assert_eq!(composed.logs.len(), 2);
        assert_eq!(compose_pipelines(PipelineSpec::empty(), PipelineSpec::empty()).run(&img).unwrap().output, img);
        assert_eq!(compose_pipelines(a.clone(), PipelineSpec::empty()).run(&img).unwrap().output, a.run(&img).unwrap().output);
    }

    #[test]
    fn external_nodes() {
        let img = crate::fixtures::text_page(20, 10, 1, 5);
        let invert = || wrap_external("invert", |r: &Raster| Ok(r.with_samples(r.samples().iter().map(|v| 255 - v).collect())), 1.0);
        let spec = PipelineSpec { post: vec![invert(), invert()], ..Default::default() };
        let out = spec.run(&img).unwrap();
        assert_eq!(out.output, img);
        assert_eq!(out.log.post[0].kind, "external");
        assert_eq!(out.log.post[0].params["label"], "invert");

        let grow = wrap_external("grow", |r: &Raster| Ok(Raster::filled(r.width() + 2, r.height(), r.channels(), 255)), 1.0);
        let spec = PipelineSpec { post: vec![grow], ..Default::default() };
        let r = &spec.run(&img).unwrap().log.post[0];
        assert_eq!(r.input_dims, [20, 10, 1]);
        assert_eq!(r.output_dims, [22, 10, 1]);

        let fail = wrap_external("boom", |_: &Raster| Err("nope".into()), 1.0);
        let spec = PipelineSpec { ink: vec![fail], ..Default::default() };
        let err = spec.run(&img).unwrap_err();
        assert!(matches!(&err, Error::Effect { phase, index: 0, source, .. } if phase == "ink" && matches!(**source, Error::External { .. })));
    }
}
