use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OcrDiff {
    pub levenshtein: usize,
    pub word_accuracy: f64,
    pub gt_words: usize,
}

impl OcrDiff {
    pub fn between(gt: &str, hyp: &str) -> Self {
        Self {
            levenshtein: levenshtein(gt, hyp),
            word_accuracy: word_accuracy(gt, hyp),
            gt_words: gt.split_whitespace().count(),
        }
    }
}

fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    edit_distance(&a, &b)
}

/// Edit distance over whitespace-separated tokens.
pub fn word_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<&str> = a.split_whitespace().collect();
    let b: Vec<&str> = b.split_whitespace().collect();
    edit_distance(&a, &b)
}

/// `1 - word_levenshtein / gt word count`, floored at 0. An empty ground truth scores 1 against
/// an empty hypothesis and 0 otherwise.
pub fn word_accuracy(gt: &str, hyp: &str) -> f64 {
    let n = gt.split_whitespace().count();
    if n == 0 {
        return if hyp.split_whitespace().next().is_none() { 1.0 } else { 0.0 };
    }
    (1.0 - word_levenshtein(gt, hyp) as f64 / n as f64).max(0.0)
}
