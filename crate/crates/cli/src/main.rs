mod augment;
mod preview;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use docgrunge::evalkit::{ocr_harness, MetricReport};
use docgrunge::pipeline::{load_spec, PipelineSpec};
use docgrunge::raster::{decode, Format};
use docgrunge::Raster;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "docgrunge", version, about = "Synthetic document degradation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Augment every image under --input into --output and write manifest.json.
    Augment(AugmentArgs),
    /// Tile several seeded variants of one image into a contact sheet.
    Preview(PreviewArgs),
    /// Print provenance from a manifest (or a directory holding manifest.json).
    Inspect(InspectArgs),
    /// Compare two images: RMSE, PSNR and SSIM.
    Metrics(MetricsArgs),
    /// OCR clean and augmented pages and report the accuracy drop as CSV.
    OcrEval(OcrArgs),
}

#[derive(Args, Clone)]
pub struct SpecArgs {
    /// Built-in name (`default`, `empty`), path to a JSON spec, or inline JSON.
    #[arg(long, default_value = "default")]
    pub spec: String,
    /// Base seed; overrides the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Texture directory for paper_factory nodes that do not name one.
    #[arg(long, env = "DOCGRUNGE_TEXTURES")]
    pub textures: Option<PathBuf>,
}

impl SpecArgs {
    pub fn load(&self) -> Result<PipelineSpec, Failure> {
        let path = Path::new(&self.spec);
        let text = if path.is_file() {
            fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        } else {
            self.spec.clone()
        };
        let mut spec = load_spec(&text, self.textures.clone()).map_err(|e| Failure::Config(e.to_string()))?;
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        Ok(spec)
    }
}

#[derive(Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Input image or directory (searched recursively).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Also write the ink, paper and merged layers.
    #[arg(long)]
    pub save_intermediates: bool,
    /// `png` or `jpeg:<quality>`.
    #[arg(long, default_value = "png", value_parser = parse_format)]
    pub format: Format,
}

#[derive(Args)]
pub struct PreviewArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub input: PathBuf,
    /// Contact sheet PNG.
    #[arg(long)]
    pub output: PathBuf,
    /// Number of variants.
    #[arg(short, long, default_value_t = 6)]
    pub n: usize,
}

#[derive(Args)]
pub struct InspectArgs {
    /// manifest.json or the output directory of an augment run.
    pub manifest: PathBuf,
    /// Only this input file (relative path as listed in the manifest).
    #[arg(long)]
    pub file: Option<String>,
}

#[derive(Args)]
pub struct MetricsArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Args)]
pub struct OcrArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Directory of clean PNG/JPEG pages, with optional `<stem>.gt.txt` ground truth.
    #[arg(long)]
    pub input: PathBuf,
    /// OCR command run via `sh -c`; `{input}` is replaced by the image path.
    #[arg(long)]
    pub ocr: String,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// How a subcommand ended, when it did not fully succeed.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Partial(String),
    Fatal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Fatal(e)
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s.split_once(':') {
        None if s == "png" => Ok(Format::Png),
        None if s == "jpeg" || s == "jpg" => Ok(Format::Jpeg { quality: 90 }),
        Some(("jpeg" | "jpg", q)) => match q.parse::<u8>() {
            Ok(q) if (1..=100).contains(&q) => Ok(Format::Jpeg { quality: q }),
            _ => Err(format!("jpeg quality must be 1..100, got {q:?}")),
        },
        _ => Err(format!("unknown format {s:?}; use png or jpeg:<quality>")),
    }
}

pub fn read_image(path: &Path) -> Result<Raster, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    decode(&bytes).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn inspect(args: &InspectArgs) -> Result<(), Failure> {
    let path = if args.manifest.is_dir() { args.manifest.join(augment::MANIFEST) } else { args.manifest.clone() };
    let text = fs::read_to_string(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let manifest: augment::Manifest = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut mismatched = Vec::new();
    let mut shown = Vec::new();
    for entry in manifest.files {
        if args.file.as_ref().is_some_and(|f| *f != entry.file) {
            continue;
        }
        let recomputed = augment::log_digest(&entry.log);
        if recomputed != entry.digest {
            mismatched.push(entry.file.clone());
        }
        shown.push(serde_json::json!({
            "file": entry.file,
            "seed": entry.seed,
            "digest": entry.digest,
            "digest_ok": recomputed == entry.digest,
            "log": entry.log,
        }));
    }
    if let Some(f) = &args.file {
        if shown.is_empty() {
            return Err(Failure::Config(format!("{f} is not in {}", path.display())));
        }
    }
    let doc = if args.file.is_some() { shown.remove(0) } else { serde_json::Value::Array(shown) };
    println!("{}", serde_json::to_string_pretty(&doc).context("render")?);
    if mismatched.is_empty() {
        Ok(())
    } else {
        Err(Failure::Partial(format!("log digest mismatch: {}", mismatched.join(", "))))
    }
}

fn metrics(args: &MetricsArgs) -> Result<(), Failure> {
    let a = read_image(&args.a)?;
    let b = read_image(&args.b)?;
    let report = MetricReport::compare(&a, &b).map_err(|e| Failure::Config(e.to_string()))?;
    println!("{}", serde_json::to_string_pretty(&report).context("render")?);
    Ok(())
}

fn ocr_eval(args: &OcrArgs) -> Result<(), Failure> {
    let spec = args.spec.load()?;
    if !args.input.is_dir() {
        return Err(Failure::Config(format!("{} is not a directory", args.input.display())));
    }
    let report = ocr_harness(&args.input, &spec, &args.ocr, args.jobs).map_err(|e| {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Fatal(e.into())
        }
    })?;
    for row in &report.rows {
        if let Err(e) = &row.outcome {
            log::warn!("{}: {e}", row.file);
        }
    }
    let csv = report.to_csv().context("csv")?;
    match &args.output {
        Some(p) => fs::write(p, csv).with_context(|| p.display().to_string())?,
        None => print!("{csv}"),
    }
    match report.failed() {
        0 => Ok(()),
        n => Err(Failure::Partial(format!("{n} of {} documents failed", report.rows.len()))),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Augment(a) => augment::run(a),
        Cmd::Preview(a) => preview::run(a),
        Cmd::Inspect(a) => inspect(a),
        Cmd::Metrics(a) => metrics(a),
        Cmd::OcrEval(a) => ocr_eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Partial(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(EXIT_PARTIAL)
        }
        Err(Failure::Fatal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
