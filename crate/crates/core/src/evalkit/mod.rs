//! Image-quality metrics and the OCR degradation harness.

mod metrics;
mod ocr;
mod text;

pub use metrics::{psnr, psnr_from_rmse, rmse, ssim, ssim_window, MetricReport, SSIM_WINDOW};
pub use ocr::{ocr_harness, shell_quote, OcrReport, OcrRow, CSV_HEADER};
pub use text::{levenshtein, word_accuracy, word_levenshtein, OcrDiff};
