use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use docgrunge::file_seed;
use docgrunge::pipeline::PipelineSpec;
use docgrunge::raster::{decode, encode, Format};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use walkdir::WalkDir;

use crate::{AugmentArgs, Failure};

pub const MANIFEST: &str = "manifest.json";
const INPUT_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub base_seed: u64,
    pub files: Vec<Entry>,
    #[serde(default)]
    pub skipped: Vec<Skipped>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Entry {
    /// Input path relative to `--input`, `/`-separated.
    pub file: String,
    pub output: String,
    pub seed: u64,
    pub digest: String,
    pub log: Value,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Skipped {
    pub file: String,
    pub error: String,
}

/// Digest of a log as stored in a manifest; equals the digest computed at run time.
pub fn log_digest(log: &Value) -> String {
    docgrunge::digest_hex(serde_json::to_string(log).expect("json value serialises").as_bytes())
}

fn is_image(p: &Path) -> bool {
    p.extension().and_then(|e| e.to_str()).is_some_and(|e| INPUT_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Input files with their `/`-separated relative paths, sorted by relative path.
pub fn collect_inputs(input: &Path) -> Result<Vec<(PathBuf, String)>, Failure> {
    if input.is_file() {
        let name = input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(vec![(input.to_path_buf(), name)]);
    }
    if !input.is_dir() {
        return Err(Failure::Config(format!("input {} does not exist", input.display())));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(input).follow_links(true) {
        let entry = entry.map_err(|e| Failure::Config(e.to_string()))?;
        if entry.file_type().is_file() && is_image(entry.path()) {
            let rel = entry.path().strip_prefix(input).expect("walk stays under root");
            let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            files.push((entry.path().to_path_buf(), rel));
        }
    }
    files.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(files)
}

fn with_extension(rel: &str, suffix: &str) -> String {
    match rel.rsplit_once('.') {
        Some((stem, _)) if !stem.is_empty() && !stem.ends_with('/') => format!("{stem}{suffix}"),
        _ => format!("{rel}{suffix}"),
    }
}

fn write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
    }
    fs::write(path, bytes).with_context(|| path.display().to_string())
}

fn process(spec: &PipelineSpec, path: &Path, rel: &str, out_dir: &Path, format: Format) -> Result<Entry, String> {
    let bytes = fs::read(path).map_err(|e| e.to_string())?;
    let img = decode(&bytes).map_err(|e| e.to_string())?;
    let seed = file_seed(spec.seed, rel);
    let out = spec.run_seeded(&img, seed).map_err(|e| e.to_string())?;
    let output = with_extension(rel, &format!(".{}", format.extension()));
    let encoded = encode(&out.output, format).map_err(|e| e.to_string())?;
    write(&out_dir.join(&output), &encoded).map_err(|e| format!("{e:#}"))?;
    for (layer, name) in [(&out.ink_layer, "ink"), (&out.paper_layer, "paper"), (&out.merged, "merged")] {
        if let Some(layer) = layer {
            let bytes = encode(layer, Format::Png).map_err(|e| e.to_string())?;
            write(&out_dir.join(with_extension(rel, &format!(".{name}.png"))), &bytes).map_err(|e| format!("{e:#}"))?;
        }
    }
    Ok(Entry { file: rel.to_string(), output, seed, digest: out.log.digest(), log: out.log.to_value() })
}

/// Runs the spec over every input and writes outputs plus the manifest, in relative-path order
/// whatever the job count.
pub fn augment_tree(spec: &PipelineSpec, input: &Path, output: &Path, jobs: usize, format: Format) -> Result<Manifest, Failure> {
    if jobs == 0 {
        return Err(Failure::Config("--jobs must be at least 1".into()));
    }
    let inputs = collect_inputs(input)?;
    fs::create_dir_all(output).with_context(|| output.display().to_string())?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().context("thread pool")?;
    let results: Vec<_> = pool.install(|| inputs.par_iter().map(|(path, rel)| (rel, process(spec, path, rel, output, format))).collect());
    let mut manifest = Manifest { base_seed: spec.seed, files: Vec::new(), skipped: Vec::new() };
    for (rel, result) in results {
        match result {
            Ok(entry) => manifest.files.push(entry),
            Err(error) => {
                log::warn!("skipping {rel}: {error}");
                manifest.skipped.push(Skipped { file: rel.clone(), error });
            }
        }
    }
    let text = serde_json::to_string_pretty(&manifest).context("manifest")?;
    write(&output.join(MANIFEST), text.as_bytes())?;
    Ok(manifest)
}

pub fn run(args: &AugmentArgs) -> Result<(), Failure> {
    let mut spec = args.spec.load()?;
    spec.save_intermediates |= args.save_intermediates;
    let manifest = augment_tree(&spec, &args.input, &args.output, args.jobs, args.format)?;
    match manifest.skipped.len() {
        0 => Ok(()),
        n => Err(Failure::Partial(format!("{n} input(s) skipped"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_names_swap_extension() {
        assert_eq!(with_extension("a/b.jpeg", ".png"), "a/b.png");
        assert_eq!(with_extension("scan.png", ".ink.png"), "scan.ink.png");
        assert_eq!(with_extension("noext", ".png"), "noext.png");
    }
}
