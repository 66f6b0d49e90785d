//! Acceptance gate: one PASS/FAIL line per criterion; exits nonzero if any criterion fails.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use docgrunge::effects::{Faxify, Gamma, SubtleNoise};
use docgrunge::evalkit::{levenshtein, ocr_harness, psnr_from_rmse, rmse, ssim, CSV_HEADER};
use docgrunge::fixtures::{golden_case, mid_range, text_page, write_texture_dir};
use docgrunge::pipeline::{default_pipeline, gate, one_of, EffectNode, Node, Phase, PipelineSpec};
use docgrunge::raster::{encode, Format};
use docgrunge::{catalog, file_seed, Effect, Raster, Sampled, StreamKey, StreamRng};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn node(effect: Box<dyn Effect>, p: f64) -> Node {
    Node::Effect(EffectNode { effect: Arc::from(effect), p })
}

fn single(phase: Phase, n: Node) -> PipelineSpec {
    let mut spec = PipelineSpec::empty();
    spec.phase_mut(phase).push(n);
    spec
}

/// Twenty synthetic pages: gray and colour, assorted sizes and line counts.
fn corpus() -> Vec<(String, Raster)> {
    (0..20)
        .map(|i| {
            let (w, h) = (48 + 13 * i, 40 + 17 * (19 - i));
            let page = text_page(w, h, 2 + i % 6, i as u64);
            let page = if i % 2 == 1 {
                Raster::from_fn_rgb(w, h, |x, y| {
                    let v = page.pixel(x, y)[0];
                    [v, v.saturating_sub((x % 7) as u8), v.saturating_sub((y % 11) as u8)]
                })
            } else {
                page
            };
            (format!("page_{i:02}.png"), page)
        })
        .collect()
}

fn set_p(spec: &mut PipelineSpec, p: f64) {
    for phase in Phase::ALL {
        for n in spec.phase_mut(phase) {
            match n {
                Node::Effect(e) => e.p = p,
                Node::OneOf { p: gp, .. } => *gp = p,
            }
        }
    }
}

fn identity_suite(tex: &Path) -> Outcome {
    let start = Instant::now();
    let corpus = corpus();
    let mut specs: Vec<(String, PipelineSpec)> = vec![("empty".into(), PipelineSpec::empty())];
    for reg in catalog().entries() {
        for phase in Phase::ALL {
            if let Some(e) = reg.identity() {
                specs.push((format!("{} identity in {}", reg.kind, phase.name()), single(phase, node(e, 1.0))));
            }
            let e = mid_range(reg.kind, Some(tex)).map_err(|e| e.to_string())?;
            specs.push((format!("{} p=0 in {}", reg.kind, phase.name()), single(phase, node(e, 0.0))));
        }
    }
    let mut all_zero = default_pipeline(Some(tex.to_path_buf()));
    set_p(&mut all_zero, 0.0);
    specs.push(("default catalog p=0".into(), all_zero));
    let members: Vec<EffectNode> =
        catalog().entries().map(|r| EffectNode { effect: Arc::from(r.default_effect()), p: 1.0 }).filter(|m| m.effect.kind() != "paper_factory").collect();
    specs.push(("one_of p=0".into(), single(Phase::Post, Node::one_of(members, 0.0).map_err(|e| e.to_string())?)));
    let mut checks = 0;
    for (label, spec) in &specs {
        for (i, (name, img)) in corpus.iter().enumerate() {
            let out = spec.run_seeded(img, file_seed(i as u64, name)).map_err(|e| format!("{label} on {name}: {e}"))?;
            ensure(out.output == *img, || format!("{label} changed {name}"))?;
            checks += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("{checks} runs over {} configurations, {:.2?}", specs.len(), took))
}

fn run_tree(spec: &PipelineSpec, corpus: &[(String, Raster)], jobs: usize) -> Vec<(Vec<u8>, String)> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().unwrap();
    pool.install(|| {
        corpus
            .par_iter()
            .map(|(name, img)| {
                let out = spec.run_seeded(img, file_seed(spec.seed, name)).unwrap();
                (encode(&out.output, Format::Png).unwrap(), out.log.digest())
            })
            .collect()
    })
}

fn determinism_suite(tex: &Path) -> Outcome {
    let corpus = corpus();
    let mut applied = 0;
    for p in [None, Some(1.0)] {
        let mut spec = default_pipeline(Some(tex.to_path_buf()));
        spec.seed = 4242;
        if let Some(p) = p {
            set_p(&mut spec, p);
        }
        let reference = run_tree(&spec, &corpus, 1);
        for run in 1..3 {
            ensure(run_tree(&spec, &corpus, 1) == reference, || format!("run {run} differs at p={p:?}"))?;
        }
        ensure(run_tree(&spec, &corpus, 8) == reference, || format!("jobs=8 differs at p={p:?}"))?;
        applied += corpus.iter().map(|(n, img)| spec.run_seeded(img, file_seed(spec.seed, n)).unwrap().log.entries().filter(|(_, r)| r.applied).count()).sum::<usize>();
    }
    Ok(format!("3 runs and jobs 1/8 identical at default p and p=1; {applied} effect applications"))
}

fn catalog_sweep(tex: &Path) -> Outcome {
    let page = text_page(600, 800, 24, 9);
    let mut total = Duration::ZERO;
    for reg in catalog().entries() {
        let e = mid_range(reg.kind, Some(tex)).map_err(|e| e.to_string())?;
        let phase = if reg.kind == "paper_factory" { Phase::Paper } else { Phase::Post };
        let spec = single(phase, node(e, 1.0));
        let start = Instant::now();
        let out = spec.run_seeded(&page, 77).map_err(|e| format!("{}: {e}", reg.kind))?;
        total += start.elapsed();
        let entry = out.log.entries().next().map(|(_, r)| r.clone()).ok_or("missing log entry")?;
        ensure(entry.applied, || format!("{} did not apply", reg.kind))?;
        let (w, h, c) = out.output.dims();
        ensure(c == 1 || c == 3, || format!("{} produced {c} channels", reg.kind))?;
        ensure(entry.output_dims == [w, h, c], || format!("{} log dims {:?} vs {:?}", reg.kind, entry.output_dims, [w, h, c]))?;
        if !matches!(reg.kind, "geometric" | "page_border") {
            ensure((w, h) == (600, 800), || format!("{} changed dims to {w}x{h}", reg.kind))?;
        }
    }
    ensure(total < Duration::from_secs(2), || format!("catalog took {total:?}"))?;
    Ok(format!("{} effects on 600x800 in {total:.2?}", catalog().len()))
}

fn naive_luma(r: &Raster) -> Vec<f64> {
    (0..r.height())
        .flat_map(|y| (0..r.width()).map(move |x| (y, x)))
        .map(|(y, x)| {
            let p = r.pixel(x, y);
            if p.len() == 1 {
                p[0] as f64
            } else {
                ((299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32 + 500) / 1000) as f64
            }
        })
        .collect()
}

#[allow(clippy::needless_range_loop)]
fn naive_ssim(a: &Raster, b: &Raster) -> f64 {
    let (w, h) = (a.width(), a.height());
    let (la, lb) = (naive_luma(a), naive_luma(b));
    let mut k = [[0.0f64; 11]; 11];
    let mut s = 0.0;
    for (i, row) in k.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            s += *v;
        }
    }
    let (c1, c2) = ((0.01f64 * 255.0).powi(2), (0.03f64 * 255.0).powi(2));
    let mut total = 0.0;
    let mut n = 0;
    for y0 in 0..=h - 11 {
        for x0 in 0..=w - 11 {
            let at = |v: &[f64], i: usize, j: usize| v[(y0 + i) * w + x0 + j];
            let (mut ma, mut mb) = (0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    ma += k[i][j] / s * at(&la, i, j);
                    mb += k[i][j] / s * at(&lb, i, j);
                }
            }
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let (da, db) = (at(&la, i, j) - ma, at(&lb, i, j) - mb);
                    va += k[i][j] / s * da * da;
                    vb += k[i][j] / s * db * db;
                    cov += k[i][j] / s * da * db;
                }
            }
            total += (2.0 * ma * mb + c1) * (2.0 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            n += 1;
        }
    }
    total / n as f64
}

fn naive_levenshtein(a: &[char], b: &[char], memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if a.is_empty() || b.is_empty() {
        return a.len().max(b.len());
    }
    if let Some(&v) = memo.get(&(a.len(), b.len())) {
        return v;
    }
    let sub = naive_levenshtein(&a[1..], &b[1..], memo) + usize::from(a[0] != b[0]);
    let del = naive_levenshtein(&a[1..], b, memo) + 1;
    let ins = naive_levenshtein(a, &b[1..], memo) + 1;
    let v = sub.min(del).min(ins);
    memo.insert((a.len(), b.len()), v);
    v
}

fn random_raster(rng: &mut StreamRng, w: usize, h: usize, c: usize) -> Raster {
    let samples = (0..w * h * c).map(|_| rng.range_i64(0, 255) as u8).collect();
    Raster::new(w, h, c, samples).unwrap()
}

fn metric_oracles() -> Outcome {
    let mut rng = StreamRng::seeded(99);
    let (mut worst_rmse, mut worst_ssim) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let (w, h, c) = (rng.range_i64(1, 40) as usize, rng.range_i64(1, 40) as usize, if i % 2 == 0 { 1 } else { 3 });
        let a = random_raster(&mut rng, w, h, c);
        let b = random_raster(&mut rng, w, h, c);
        let mut sum = 0.0;
        for (x, y) in a.samples().iter().zip(b.samples()) {
            sum += (*x as f64 - *y as f64).powi(2);
        }
        let oracle = (sum / a.samples().len() as f64).sqrt();
        worst_rmse = worst_rmse.max((rmse(&a, &b).unwrap() - oracle).abs());
    }
    for i in 0..100 {
        let (w, h, c) = (rng.range_i64(11, 36) as usize, rng.range_i64(11, 36) as usize, if i % 2 == 0 { 1 } else { 3 });
        let a = random_raster(&mut rng, w, h, c);
        let b = if i % 3 == 0 {
            random_raster(&mut rng, w, h, c)
        } else {
            let amp = rng.range_i64(1, 60);
            let samples = a.samples().iter().map(|&v| (v as i64 + rng.range_i64(-amp, amp)).clamp(0, 255) as u8).collect();
            Raster::new(w, h, c, samples).unwrap()
        };
        worst_ssim = worst_ssim.max((ssim(&a, &b).unwrap() - naive_ssim(&a, &b)).abs());
    }
    let alphabet: Vec<char> = "abcé d".chars().collect();
    for _ in 0..100 {
        let word = |rng: &mut StreamRng| -> String { (0..rng.range_i64(0, 12)).map(|_| alphabet[rng.index(alphabet.len())]).collect() };
        let (a, b) = (word(&mut rng), word(&mut rng));
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let oracle = naive_levenshtein(&ca, &cb, &mut HashMap::new());
        ensure(levenshtein(&a, &b) == oracle, || format!("levenshtein({a:?},{b:?}) != {oracle}"))?;
    }
    ensure(worst_rmse <= 1e-6, || format!("rmse off by {worst_rmse:e}"))?;
    ensure(worst_ssim <= 1e-6, || format!("ssim off by {worst_ssim:e}"))?;
    ensure(levenshtein("kitten", "sitting") == 3, || "kitten/sitting".into())?;
    let db = psnr_from_rmse(6.52);
    ensure((db - 31.85).abs() <= 0.01, || format!("psnr(6.52) = {db}"))?;
    Ok(format!("max |rmse err| {worst_rmse:.1e}, max |ssim err| {worst_ssim:.1e}, levenshtein exact, psnr(6.52) = {db:.4} dB"))
}

fn statistical_suites() -> Outcome {
    let hits = (0..10_000u64).filter(|&s| gate(0.5, &mut StreamRng::new(s, StreamKey::node(2, 0)))).count();
    let rate = hits as f64 / 1e4;
    ensure((0.47..=0.53).contains(&rate), || format!("gate rate {rate}"))?;

    let tiny = Raster::filled(4, 4, 1, 200);
    let members: Vec<EffectNode> =
        (0..3).map(|_| EffectNode { effect: Arc::new(Gamma { gamma: Sampled::Fixed(1.0) }), p: 1.0 }).collect();
    let mut counts = [0usize; 3];
    for s in 0..9000u64 {
        let (_, r) = one_of(&members, 1.0, &tiny, s, Phase::Post, 0).unwrap();
        counts[r.chosen.ok_or("one_of with p=1 did not choose")?] += 1;
    }
    let shares = counts.map(|c| c as f64 / 9000.0);
    ensure(shares.iter().all(|s| (s - 1.0 / 3.0).abs() <= 0.03), || format!("one_of shares {shares:?}"))?;

    let gray = Raster::filled(200, 200, 1, 128);
    let mut duties = Vec::new();
    for s in 0..5 {
        let mut r = StreamRng::seeded(s);
        let fax = Faxify::default();
        let out = Effect::resolve(&fax, &mut r).apply(&gray, &mut r).unwrap();
        ensure(out.samples().iter().all(|&v| v == 0 || v == 255), || "faxify output not binary".into())?;
        let black = out.samples().iter().filter(|&&v| v == 0).count() as f64 / out.samples().len() as f64;
        ensure((black - 0.5).abs() <= 0.05, || format!("faxify black fraction {black}"))?;
        duties.push(black);
    }

    let n = 256 * 256;
    let mut worst = 0.0f64;
    for r in [1u32, 3, 5, 8] {
        for s in 0..5 {
            let flat = Raster::filled(256, 256, 1, 128);
            let out = SubtleNoise { range: Sampled::Fixed(r) }.apply(&flat, &mut StreamRng::seeded(s)).unwrap();
            let mean = out.samples().iter().map(|&v| v as f64).sum::<f64>() / n as f64;
            let bound = r as f64 / (n as f64).sqrt() * 4.0;
            ensure((mean - 128.0).abs() <= bound, || format!("subtle_noise r={r} mean {mean} exceeds {bound}"))?;
            worst = worst.max((mean - 128.0).abs() / bound);
        }
    }
    Ok(format!(
        "gate {rate:.4}, one_of {:.4}/{:.4}/{:.4}, faxify duty {:.4}..{:.4}, subtle_noise worst {:.0}% of bound",
        shares[0],
        shares[1],
        shares[2],
        duties.iter().cloned().fold(1.0, f64::min),
        duties.iter().cloned().fold(0.0, f64::max),
        worst * 100.0
    ))
}

fn golden_images(tex: &Path) -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut mismatched = Vec::new();
    for kind in catalog().kinds() {
        let expected = std::fs::read(dir.join(format!("{kind}.png"))).map_err(|e| format!("{kind}: {e}"))?;
        let img = golden_case(kind, tex).map_err(|e| format!("{kind}: {e}"))?;
        ensure(img.dims().0 == 128 || kind == "geometric" || kind == "page_border", || format!("{kind} width {}", img.width()))?;
        if encode(&img, Format::Png).map_err(|e| e.to_string())? != expected {
            mismatched.push(kind);
        }
    }
    ensure(mismatched.is_empty(), || format!("differs from golden: {}", mismatched.join(", ")))?;
    Ok(format!("{} golden PNGs byte-identical", catalog().len()))
}

fn ocr_plumbing() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (i, name) in ["b.png", "a.png", "c.png"].iter().enumerate() {
        let page = text_page(90, 70, 3, i as u64);
        std::fs::write(dir.path().join(name), encode(&page, Format::Png).unwrap()).unwrap();
    }
    std::fs::write(dir.path().join("c.gt.txt"), "nothing like the hash").unwrap();
    let stub = "sha256sum {input} | cut -c1-16";
    let report = ocr_harness(dir.path(), &PipelineSpec::empty(), stub, 2).map_err(|e| e.to_string())?;
    let csv = report.to_csv().map_err(|e| e.to_string())?;
    let lines: Vec<&str> = csv.lines().collect();
    ensure(lines[0] == CSV_HEADER.join(","), || format!("header {:?}", lines[0]))?;
    ensure(lines[0] == "file,levenshtein,word_accuracy_clean_vs_gt,word_accuracy_noisy_vs_gt,accuracy_drop", || "header text".into())?;
    ensure(lines.len() == 5 && lines[4].starts_with("mean,"), || format!("rows {lines:?}"))?;
    let files: Vec<&str> = report.rows.iter().map(|r| r.file.as_str()).collect();
    ensure(files == ["a.png", "b.png", "c.png"], || format!("order {files:?}"))?;
    ensure(report.failed() == 0, || format!("failures {:?}", report.rows))?;
    ensure(report.scored().all(|s| s.levenshtein == 0), || "nonzero levenshtein".into())?;
    ensure(report.mean_accuracy_drop() == Some(0.0), || format!("drop {:?}", report.mean_accuracy_drop()))?;

    let mut spec = default_pipeline(None);
    set_p(&mut spec, 1.0);
    let echo = ocr_harness(dir.path(), &spec, "echo fixed words {input} >/dev/null; echo fixed words", 1).map_err(|e| e.to_string())?;
    ensure(echo.scored().count() == 3 && echo.scored().all(|s| s.levenshtein == 0), || format!("echo stub {:?}", echo.rows))?;

    let failing = ocr_harness(dir.path(), &PipelineSpec::empty(), "case {input} in *b.png) exit 1;; *) echo ok;; esac", 1).map_err(|e| e.to_string())?;
    let csv = failing.to_csv().map_err(|e| e.to_string())?;
    ensure(csv.lines().nth(2) == Some("b.png,failed,,,") && failing.failed() == 1, || format!("failed row: {csv}"))?;
    Ok("identity drop 0%, schema exact, failures marked and run continues".into())
}

fn main() {
    let tex = tempfile::tempdir().expect("tempdir");
    write_texture_dir(tex.path()).expect("texture");
    let criteria: [Criterion; 7] = [
        ("identity suite", Box::new(|| identity_suite(tex.path()))),
        ("determinism suite", Box::new(|| determinism_suite(tex.path()))),
        ("catalog sweep", Box::new(|| catalog_sweep(tex.path()))),
        ("metric oracles", Box::new(metric_oracles)),
        ("statistical suites", Box::new(statistical_suites)),
        ("golden images", Box::new(|| golden_images(tex.path()))),
        ("ocr harness plumbing", Box::new(ocr_plumbing)),
    ];
    let mut failed = 0;
    for (name, check) in criteria.iter() {
        match std::panic::catch_unwind(std::panic::AssertUnwindSafe(check)) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(reason)) => {
                failed += 1;
                println!("FAIL {name}: {reason}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
