//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ddc_align::baseline::{
    dkw_gamma, hoeffding_sample_count, random_labeling, sample_random_ddc, SamplingMode,
};
use ddc_align::gram::{build_gram, relu_kernel};
use ddc_align::ingest::{
    build_bow, inject_duplicate_pair, synth_blobs, synth_disjoint_vocab_corpus,
    synth_gaussian_classes, synth_topic_corpus, BlobAxis, Dataset, Tokenizer,
};
use ddc_align::pipeline::{analyze, AnalysisParams, NamedDataset};
use ddc_align::spectral::{ddc, ddc_bounds, decompose, jensen_upper_bound, Spectrum};

mod common;

use common::{ddc_direct, gaussian_dataset, mean_std, orthonormal_dataset};

type Outcome = Result<String, String>;
/// Name, check, runtime limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spectrum_of(d: &Dataset) -> Spectrum {
    decompose(&build_gram(d).unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for n in [4, 64, 512] {
        let s = spectrum_of(&orthonormal_dataset(n, &mut rng));
        for v in sample_random_ddc(&s, 50, SamplingMode::Iid, n as u64).unwrap() {
            worst = worst.max((v - 2.0).abs());
        }
    }
    check(worst < 1e-9, format!("max |DDC - 2| = {worst:.3e}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for t in 0..20 {
        let n = rng.random_range(10..=100) * 2;
        let d = rng.random_range(5..=50);
        let data = gaussian_dataset(n, d, &mut rng);
        let g = build_gram(&data).unwrap();
        let s = decompose(&g).unwrap();
        let y = random_labeling(n, SamplingMode::Iid, 100 + t, 0);
        let a = ddc(&s, &y).unwrap().ddc;
        let b = ddc_direct(&g, &y);
        worst = worst.max((a - b).abs() / b.abs());
    }
    check(
        worst < 1e-8,
        format!("max relative discrepancy = {worst:.3e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = 2000;
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [6, 9, 12] {
        let s = spectrum_of(&gaussian_dataset(n, 4, &mut rng));
        let b = ddc_bounds(&s);
        let mut sum = 0.0;
        let mut outside = 0;
        for mask in 0u32..(1 << n) {
            let y: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            let v = s.ddc_value(&y);
            if !b.contains(v, 1e-12) {
                outside += 1;
            }
            sum += v;
        }
        let exact = sum / (1u64 << n) as f64;
        let samples = sample_random_ddc(&s, m, SamplingMode::Iid, n as u64).unwrap();
        let sampled = samples.iter().sum::<f64>() / m as f64;
        let tol = 3.0 * b.range / (m as f64).sqrt();
        let gap = (sampled - exact).abs();
        ok &= outside == 0 && gap <= tol;
        lines.push(format!(
            "n={n}: {outside} outside, |mean gap| {gap:.3e} <= {tol:.3e}"
        ));
    }
    check(ok, lines.join("; "))
}

fn criterion_4() -> Outcome {
    let cases = [
        (-1.0, 0.0),
        (-0.5, -1.0 / 12.0),
        (0.0, 0.0),
        (0.5, 1.0 / 6.0),
        (1.0, 0.5),
    ];
    let worst = cases
        .iter()
        .map(|&(c, v)| (relu_kernel(c) - v).abs())
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = build_gram(&gaussian_dataset(50, 7, &mut rng)).unwrap();
    let diag_exact = (0..g.n()).all(|i| g.get(i, i) == 0.5);
    check(
        worst < 1e-12 && diag_exact,
        format!("max closed-form error {worst:.1e}, diagonal exactly 0.5: {diag_exact}"),
    )
}

fn criterion_5() -> Outcome {
    let params = AnalysisParams {
        n_target: None,
        replicates: 1,
        ..Default::default()
    };
    let (mut x_ok, mut y_ok) = (0, 0);
    let mut zs = Vec::new();
    for seed in 0..10 {
        let (x, y) = synth_blobs(200, 6.0, BlobAxis::X, seed).unwrap();
        let rep = analyze(
            &[
                NamedDataset::new("x-only", x),
                NamedDataset::new("y-only", y),
            ],
            &AnalysisParams {
                seed,
                ..params.clone()
            },
            None,
        )
        .unwrap();
        let zx = rep.replicates[0].runs[0].baseline.zscore.0;
        let zy = rep.replicates[0].runs[1].baseline.zscore.0;
        x_ok += (zx < -5.0) as usize;
        y_ok += (zy.abs() < 3.0) as usize;
        zs.push(format!("({zx:.1},{zy:.1})"));
    }
    check(
        x_ok >= 9 && y_ok >= 9,
        format!(
            "x-only z<-5 in {x_ok}/10, y-only |z|<3 in {y_ok}/10; z(x,y): {}",
            zs.join(" ")
        ),
    )
}

fn criterion_6() -> Outcome {
    let base = synth_gaussian_classes(500, 20, 1.0, 6).unwrap();
    let agree = inject_duplicate_pair(&base, true).unwrap();
    let disagree = inject_duplicate_pair(&base, false).unwrap();
    let s = spectrum_of(&disagree);
    let real_agree = ddc(&s, agree.labels()).unwrap().ddc;
    let real_disagree = ddc(&s, disagree.labels()).unwrap().ddc;

    let (m, seed) = (2000, 66);
    let samples = sample_random_ddc(&s, m, SamplingMode::Iid, seed).unwrap();
    let n = s.n();
    let (mut same, mut diff) = (Vec::new(), Vec::new());
    for (j, v) in samples.into_iter().enumerate() {
        let y = random_labeling(n, SamplingMode::Iid, seed, j as u64);
        if y[n - 2] == y[n - 1] {
            same.push(v);
        } else {
            diff.push(v);
        }
    }
    let (ms, ss) = mean_std(&same);
    let (md, sd) = mean_std(&diff);
    let sep = (md - ms).abs() / ss.max(sd);
    check(
        real_disagree > real_agree && sep > 5.0,
        format!(
            "real DDC disagree {real_disagree:.3} > agree {real_agree:.3}; \
             group means {ms:.3} / {md:.3} differ by {sep:.1} within-group std"
        ),
    )
}

fn criterion_7() -> Outcome {
    let m = hoeffding_sample_count(1.0, 0.1, 0.05).unwrap();
    let g = dkw_gamma(100, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut jensen_ok = 0;
    let samples_m = 500;
    for t in 0..20 {
        let n = rng.random_range(10..=60) * 2;
        let d = rng.random_range(3..=30);
        let s = spectrum_of(&gaussian_dataset(n, d, &mut rng));
        let v = sample_random_ddc(&s, samples_m, SamplingMode::Iid, t).unwrap();
        let (mean, std) = mean_std(&v);
        if jensen_upper_bound(&s) >= mean - 3.0 * std / (samples_m as f64).sqrt() {
            jensen_ok += 1;
        }
    }
    check(
        m == 185 && (g - 0.13583).abs() <= 1e-4 && jensen_ok == 20,
        format!("hoeffding m = {m}, dkw gamma = {g:.5}, Jensen holds on {jensen_ok}/20"),
    )
}

fn scrambled(d: &Dataset, seed: u64) -> Dataset {
    let mut order: Vec<usize> = (0..d.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut rows = Vec::with_capacity(d.rows().len());
    for &i in &order {
        rows.extend_from_slice(d.row(i));
    }
    Dataset::new(
        d.ids().to_vec(),
        rows,
        d.dim(),
        d.labels().to_vec(),
        d.classes().clone(),
    )
    .unwrap()
}

fn criterion_8() -> Outcome {
    let corpus = synth_topic_corpus(8000, 60, 30, 0.5, 8).unwrap();
    let bow = build_bow(&corpus, &Tokenizer::default()).unwrap();
    let scr = scrambled(&bow, 88);
    let mut ratios = Vec::new();
    let mut ranking_same = true;
    let mut lines = Vec::new();
    for n in [500, 1000, 2000] {
        let rep = analyze(
            &[
                NamedDataset::new("informative", bow.clone()),
                NamedDataset::new("scrambled", scr.clone()),
            ],
            &AnalysisParams {
                n_target: Some(n),
                replicates: 1,
                random_labelings: Some(1000),
                ..Default::default()
            },
            None,
        )
        .unwrap();
        let ri = rep.replicates[0].runs[0].baseline.ratio.0;
        let rs = rep.replicates[0].runs[1].baseline.ratio.0;
        ranking_same &= ri < rs;
        ratios.push(ri);
        lines.push(format!("n={n}: {ri:.3} vs scrambled {rs:.3}"));
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        - ratios.iter().cloned().fold(f64::MAX, f64::min);
    check(
        spread < 0.1 && ranking_same,
        format!("ratio spread {spread:.3}; {}", lines.join(", ")),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_topic_corpus(400, 60, 30, 0.5, 9).unwrap();
    let path = dir.path().join("corpus.jsonl");
    let lines: Vec<String> = corpus
        .records()
        .iter()
        .map(|r| {
            let text = match &r.content {
                ddc_align::ingest::Content::Text(t) => t.clone(),
                ddc_align::ingest::Content::Vector(_) => unreachable!(),
            };
            serde_json::json!({"id": r.id, "label": r.label, "text": text}).to_string()
        })
        .collect();
    std::fs::write(&path, lines.join("\n")).unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out-{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_ddc-align"))
            .env("DDC_THREADS", threads)
            .args(["compute", "--corpus"])
            .arg(&path)
            .args([
                "--repr",
                "bow",
                "--n",
                "200",
                "--replicates",
                "2",
                "--seed",
                "9",
                "--out",
            ])
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return Err(format!(
                "compute failed: {}",
                String::from_utf8_lossy(&status.stderr)
            ));
        }
        outputs.push(std::fs::read(out.join("report.json")).unwrap());
    }
    check(
        outputs[0] == outputs[1],
        format!(
            "report.json identical under DDC_THREADS=1 and 4 ({} bytes)",
            outputs[0].len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let (mut real_ok, mut shuf_ok) = (0, 0);
    let mut zs = Vec::new();
    for seed in 0..10 {
        let corpus = synth_disjoint_vocab_corpus(100, 100, 20, seed).unwrap();
        let bow = build_bow(&corpus, &Tokenizer::default()).unwrap();
        let mut labels = bow.labels().to_vec();
        labels.shuffle(&mut ChaCha8Rng::seed_from_u64(1000 + seed));
        let shuffled = bow.with_labels(labels).unwrap();
        let params = AnalysisParams {
            n_target: None,
            replicates: 1,
            seed,
            ..Default::default()
        };
        let z = |d: Dataset| {
            analyze(&[NamedDataset::new("bow", d)], &params, None)
                .unwrap()
                .replicates[0]
                .runs[0]
                .baseline
                .zscore
                .0
        };
        let (zr, zs_) = (z(bow), z(shuffled));
        real_ok += (zr < -10.0) as usize;
        shuf_ok += (zs_.abs() < 3.0) as usize;
        zs.push(format!("({zr:.1},{zs_:.1})"));
    }
    check(
        real_ok == 10 && shuf_ok == 10,
        format!(
            "community z<-10 in {real_ok}/10, shuffled |z|<3 in {shuf_ok}/10; z: {}",
            zs.join(" ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 orthonormal identity", criterion_1, Some(10)),
        ("2 two-path equivalence", criterion_2, Some(30)),
        ("3 exhaustive bound containment", criterion_3, Some(60)),
        ("4 kernel correctness", criterion_4, None),
        ("5 blob scenario", criterion_5, Some(120)),
        ("6 duplicate-pair pathology", criterion_6, Some(120)),
        ("7 concentration formulas", criterion_7, None),
        ("8 subsampling stability", criterion_8, Some(300)),
        ("9 determinism across thread counts", criterion_9, None),
        ("10 disjoint-vocabulary corpus", criterion_10, Some(60)),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let t = Instant::now();
        let outcome = f();
        let elapsed = t.elapsed();
        let over = limit.is_some_and(|l| elapsed > Duration::from_secs(l));
        let (pass, detail) = match outcome {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {}s limit", limit.unwrap())),
            Err(d) => (false, d),
        };
        failed += (!pass) as usize;
        println!(
            "[{}] criterion {name} ({:.1}s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
