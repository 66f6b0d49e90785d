use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rayon::prelude::*;
use serde::Serialize;

use super::text::{levenshtein, word_accuracy};
use crate::error::{Error, Result};
use crate::pipeline::PipelineSpec;
use crate::raster::{decode, encode, Format};

pub const CSV_HEADER: [&str; 5] =
    ["file", "levenshtein", "word_accuracy_clean_vs_gt", "word_accuracy_noisy_vs_gt", "accuracy_drop"];

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// One document. `levenshtein` compares the clean and noisy OCR strings; accuracies are word
/// accuracies against the ground truth and `accuracy_drop` is clean minus noisy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OcrRow {
    pub file: String,
    pub outcome: std::result::Result<OcrScores, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OcrScores {
    pub levenshtein: usize,
    pub word_accuracy_clean_vs_gt: f64,
    pub word_accuracy_noisy_vs_gt: f64,
    pub accuracy_drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OcrReport {
    pub rows: Vec<OcrRow>,
}

impl OcrReport {
    pub fn scored(&self) -> impl Iterator<Item = &OcrScores> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().ok())
    }

    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// Means over successful rows; `None` when nothing succeeded.
    pub fn mean(&self) -> Option<(f64, f64, f64, f64)> {
        let n = self.scored().count();
        if n == 0 {
            return None;
        }
        let mut acc = (0.0, 0.0, 0.0, 0.0);
        for s in self.scored() {
            acc.0 += s.levenshtein as f64;
            acc.1 += s.word_accuracy_clean_vs_gt;
            acc.2 += s.word_accuracy_noisy_vs_gt;
            acc.3 += s.accuracy_drop;
        }
        let n = n as f64;
        Some((acc.0 / n, acc.1 / n, acc.2 / n, acc.3 / n))
    }

    pub fn mean_accuracy_drop(&self) -> Option<f64> {
        self.mean().map(|m| m.3)
    }

    /// Per-document rows in filename order, then a `mean` row. Failed rows read `failed` in the
    /// levenshtein column and leave the rest empty.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for row in &self.rows {
            let rec = match &row.outcome {
                Ok(s) => vec![
                    row.file.clone(),
                    s.levenshtein.to_string(),
                    fmt(s.word_accuracy_clean_vs_gt),
                    fmt(s.word_accuracy_noisy_vs_gt),
                    fmt(s.accuracy_drop),
                ],
                Err(_) => vec![row.file.clone(), "failed".into(), String::new(), String::new(), String::new()],
            };
            w.write_record(&rec).map_err(csv_err)?;
        }
        let mean = match self.mean() {
            Some((l, c, n, d)) => vec!["mean".into(), fmt(l), fmt(c), fmt(n), fmt(d)],
            None => vec!["mean".into(), String::new(), String::new(), String::new(), String::new()],
        };
        w.write_record(&mean).map_err(csv_err)?;
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Single-quotes a path for `sh`.
pub fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

fn run_ocr(template: &str, input: &Path) -> std::result::Result<String, String> {
    let cmd = template.replace("{input}", &shell_quote(&input.to_string_lossy()));
    let out = Command::new("sh").arg("-c").arg(&cmd).output().map_err(|e| format!("spawn: {e}"))?;
    if !out.status.success() {
        return Err(format!("ocr exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr).trim()));
    }
    String::from_utf8(out.stdout).map_err(|e| format!("ocr output is not utf-8: {e}"))
}

fn ground_truth(image: &Path) -> Option<String> {
    let stem = image.file_stem()?.to_string_lossy().into_owned();
    let dir = image.parent()?;
    [format!("{stem}.gt.txt"), format!("{stem}.txt")].iter().find_map(|n| fs::read_to_string(dir.join(n)).ok())
}

fn images_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension().and_then(|e| e.to_str()).is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn score(spec: &PipelineSpec, template: &str, path: &Path, name: &str, scratch: &Path) -> std::result::Result<OcrScores, String> {
    let img = decode(&fs::read(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let out = spec.run_seeded(&img, crate::file_seed(spec.seed, name)).map_err(|e| e.to_string())?;
    let noisy_path = scratch.join(format!("{name}.png"));
    fs::write(&noisy_path, encode(&out.output, Format::Png).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let clean = run_ocr(template, path)?;
    let noisy = run_ocr(template, &noisy_path)?;
    let gt = ground_truth(path).unwrap_or_else(|| clean.clone());
    let wc = word_accuracy(&gt, &clean);
    let wn = word_accuracy(&gt, &noisy);
    Ok(OcrScores { levenshtein: levenshtein(&clean, &noisy), word_accuracy_clean_vs_gt: wc, word_accuracy_noisy_vs_gt: wn, accuracy_drop: wc - wn })
}

/// OCRs every PNG/JPEG in `clean_dir` before and after augmentation with `spec`.
///
/// `ocr_command` is run through `sh -c` with `{input}` replaced by the quoted image path and must
/// print the recognised text. Ground truth comes from `<stem>.gt.txt` or `<stem>.txt` beside the
/// image, falling back to the clean OCR output. Each file uses the seed `file_seed(spec.seed, name)`.
/// At most `jobs` documents run at once; rows are ordered by filename.
pub fn ocr_harness(clean_dir: &Path, spec: &PipelineSpec, ocr_command: &str, jobs: usize) -> Result<OcrReport> {
    if !ocr_command.contains("{input}") {
        return Err(Error::Config("ocr command must contain an {input} placeholder".into()));
    }
    if jobs == 0 {
        return Err(Error::Config("jobs must be at least 1".into()));
    }
    let files = images_in(clean_dir)?;
    let scratch = tempfile::tempdir()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::Config(e.to_string()))?;
    let rows = pool.install(|| {
        files
            .par_iter()
            .map(|path| {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let outcome = score(spec, ocr_command, path, &name, scratch.path());
                OcrRow { file: name, outcome }
            })
            .collect()
    });
    Ok(OcrReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting_survives_apostrophes() {
        let out = Command::new("sh").arg("-c").arg(format!("printf %s {}", shell_quote("it's a $path"))).output().unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), "it's a $path");
    }

    #[test]
    fn csv_marks_failures_and_appends_mean() {
        let report = OcrReport {
            rows: vec![
                OcrRow { file: "a.png".into(), outcome: Ok(OcrScores { levenshtein: 4, word_accuracy_clean_vs_gt: 1.0, word_accuracy_noisy_vs_gt: 0.5, accuracy_drop: 0.5 }) },
                OcrRow { file: "b.png".into(), outcome: Err("boom".into()) },
            ],
        };
        let csv = report.to_csv().unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1], "a.png,4,1.000000,0.500000,0.500000");
        assert_eq!(lines[2], "b.png,failed,,,");
        assert_eq!(lines[3], "mean,4.000000,1.000000,0.500000,0.500000");
        assert_eq!(report.failed(), 1);
    }

    #[test]
    fn placeholder_is_required() {
        let dir = tempfile::tempdir().unwrap();
        assert!(ocr_harness(dir.path(), &PipelineSpec::empty(), "cat", 1).unwrap_err().is_config());
    }
}
