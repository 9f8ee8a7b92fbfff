//! End-to-end alignment protocol: ingest, dedup, paired subsamples, then per
//! representation Gram matrix, spectrum, real DDC and random-labeling baseline.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::baseline::{
    calibrate, default_sample_count, histogram, hoeffding_sample_count, sample_baseline,
    BaselineDistribution, RandomSamples, SamplingMode, DEFAULT_CONFIDENCE_DELTA,
    DEFAULT_MAX_SAMPLES,
};
use crate::error::{Error, Result};
use crate::gram::{build_gram_blocked, DEFAULT_BLOCK_ROWS};
use crate::ingest::{
    balanced_indices, dedup, inject_duplicate_pair, synth_blobs, synth_gaussian_classes, BlobAxis,
    Dataset, DedupMode, RawCorpus, RepresentationSpec, Tokenizer, VectorTable,
    DEFAULT_DEDUP_TOLERANCE,
};
use crate::io::{self, CsvWriter};
use crate::report::{
    mean_std, AlignmentReport, BaselineSummary, InputSummary, Metric, ReplicateReport,
    ReportSettings, RepresentationAggregate, RunReport, SampleCountSummary, SpectrumSummary,
    REPORT_SCHEMA_VERSION,
};
use crate::spectral::{
    ddc, ddc_bounds, decompose, jensen_upper_bound, pca_coords, variance_explained, DdcResult,
    Spectrum,
};

pub const DEFAULT_N_TARGET: usize = 2000;
pub const DEFAULT_REPLICATES: usize = 4;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TOP_K: usize = 100;

/// Relative slack allowed when checking DDC values against the spectral bounds.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Corpus(PathBuf),
    Embeddings { matrix: PathBuf, labels: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReprKind {
    BagOfWords,
    MeanStatic,
    Dense,
    Coordinates(Vec<usize>),
}

impl ReprKind {
    /// Parses `bow`, `mean-static`, `dense` or `coords:i,j,...`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bow" => Ok(ReprKind::BagOfWords),
            "mean-static" => Ok(ReprKind::MeanStatic),
            "dense" => Ok(ReprKind::Dense),
            _ => {
                let Some(list) = s.strip_prefix("coords:") else {
                    return Err(Error::config(format!(
                        "unknown representation `{s}` (expected bow, mean-static, dense or coords:i,j)"
                    )));
                };
                let idx = list
                    .split(',')
                    .map(|t| {
                        t.trim().parse::<usize>().map_err(|_| {
                            Error::config(format!("bad coordinate index `{t}` in `{s}`"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ReprKind::Coordinates(idx))
            }
        }
    }
}

/// Protocol parameters that do not depend on where the data came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    /// Balanced sample size per replicate; `None` uses every post-dedup example.
    pub n_target: Option<usize>,
    pub replicates: usize,
    pub mode: SamplingMode,
    /// Fixed number of random labelings; overrides `epsilon`.
    pub random_labelings: Option<usize>,
    /// Absolute Hoeffding accuracy; `None` means 5% of the real DDC.
    pub epsilon: Option<f64>,
    pub delta: f64,
    pub seed: u64,
    pub dedup: DedupMode,
    pub dedup_tolerance: f64,
    pub top_k: usize,
    pub block_rows: usize,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            n_target: Some(DEFAULT_N_TARGET),
            replicates: DEFAULT_REPLICATES,
            mode: SamplingMode::Iid,
            random_labelings: None,
            epsilon: None,
            delta: DEFAULT_CONFIDENCE_DELTA,
            seed: DEFAULT_SEED,
            dedup: DedupMode::DropAll,
            dedup_tolerance: DEFAULT_DEDUP_TOLERANCE,
            top_k: DEFAULT_TOP_K,
            block_rows: DEFAULT_BLOCK_ROWS,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.n_target {
            if n < 2 || n % 2 != 0 {
                return Err(Error::config(format!(
                    "n must be even and at least 2, got {n}"
                )));
            }
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates must be at least 1"));
        }
        if self.random_labelings == Some(0) {
            return Err(Error::config("random-labelings must be at least 1"));
        }
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::config(format!("epsilon must be positive, got {e}")));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config(format!(
                "delta must be in (0, 1), got {}",
                self.delta
            )));
        }
        if self.dedup_tolerance.is_nan() || self.dedup_tolerance < 0.0 {
            return Err(Error::config("dedup tolerance must be non-negative"));
        }
        if self.top_k == 0 {
            return Err(Error::config("top-k must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: InputSource,
    pub vectors: Option<PathBuf>,
    pub representations: Vec<ReprKind>,
    pub token_pattern: Option<String>,
    pub params: AnalysisParams,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let mut paths: Vec<&Path> = match &self.input {
            InputSource::Corpus(p) => vec![p],
            InputSource::Embeddings { matrix, labels } => vec![matrix, labels],
        };
        if let Some(v) = &self.vectors {
            paths.push(v);
        }
        for p in paths {
            if !p.is_file() {
                return Err(Error::config(format!(
                    "input file {} does not exist",
                    p.display()
                )));
            }
        }
        if self.representations.is_empty() {
            return Err(Error::config("at least one representation is required"));
        }
        if self.representations.contains(&ReprKind::MeanStatic) && self.vectors.is_none() {
            return Err(Error::config("mean-static representation needs --vectors"));
        }
        self.params.validate()
    }

    fn specs(&self) -> Result<Vec<RepresentationSpec>> {
        let tokenizer = match &self.token_pattern {
            Some(p) => Tokenizer::with_pattern(p)?,
            None => Tokenizer::default(),
        };
        let table = match &self.vectors {
            Some(p) if self.representations.contains(&ReprKind::MeanStatic) => {
                Some(Arc::new(VectorTable::load(p)?))
            }
            _ => None,
        };
        self.representations
            .iter()
            .map(|r| {
                Ok(match r {
                    ReprKind::BagOfWords => RepresentationSpec::BagOfWords {
                        tokenizer: tokenizer.clone(),
                    },
                    ReprKind::MeanStatic => RepresentationSpec::MeanStatic {
                        table: table.clone().expect("vector table loaded"),
                        tokenizer: tokenizer.clone(),
                    },
                    ReprKind::Dense => RepresentationSpec::Dense,
                    ReprKind::Coordinates(idx) => RepresentationSpec::Coordinates {
                        indices: idx.clone(),
                    },
                })
            })
            .collect()
    }
}

/// A representation of the whole corpus under a display name.
#[derive(Debug, Clone)]
pub struct NamedDataset {
    pub name: String,
    pub data: Dataset,
}

impl NamedDataset {
    pub fn new(name: impl Into<String>, data: Dataset) -> Self {
        Self {
            name: name.into(),
            data,
        }
    }
}

/// Everything computed for one (replicate, representation) pair.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub replicate: usize,
    pub representation: String,
    pub dataset: Dataset,
    pub spectrum: Spectrum,
    pub real: DdcResult,
    pub random: RandomSamples,
    pub baseline: BaselineDistribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunTimings {
    pub gram_secs: f64,
    pub eigen_secs: f64,
    pub sampling_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingEntry {
    pub replicate: usize,
    pub representation: String,
    #[serde(flatten)]
    pub timings: RunTimings,
}

/// Loads the configured inputs, runs the protocol and writes all outputs to
/// `config.out_dir`.
pub fn run(config: &RunConfig) -> Result<AlignmentReport> {
    config.validate()?;
    let corpus = match &config.input {
        InputSource::Corpus(p) => io::read_corpus_jsonl(p)?,
        InputSource::Embeddings { matrix, labels } => io::read_embeddings(matrix, labels)?,
    };
    let datasets = build_representations(&corpus, &config.specs()?)?;
    analyze(&datasets, &config.params, Some(&config.out_dir))
}

pub fn build_representations(
    corpus: &RawCorpus,
    specs: &[RepresentationSpec],
) -> Result<Vec<NamedDataset>> {
    let mut out: Vec<NamedDataset> = Vec::with_capacity(specs.len());
    for spec in specs {
        let name = spec.name();
        if out.iter().any(|d| d.name == name) {
            return Err(Error::config(format!(
                "representation `{name}` listed twice"
            )));
        }
        out.push(NamedDataset::new(name, spec.build(corpus)?));
    }
    Ok(out)
}

/// Stable 64-bit mix of a base seed with a sequence of indices.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts
        .iter()
        .fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

const SUBSAMPLE_STREAM: u64 = 0;
const LABELING_STREAM: u64 = 1;

/// Runs the protocol on prebuilt representations. All datasets must share
/// ids, labels and order. When `out_dir` is given, per-run plot data,
/// `report.json` and `timings.json` are written there.
pub fn analyze(
    datasets: &[NamedDataset],
    params: &AnalysisParams,
    out_dir: Option<&Path>,
) -> Result<AlignmentReport> {
    params.validate()?;
    let Some(first) = datasets.first() else {
        return Err(Error::config("at least one representation is required"));
    };
    for d in &datasets[1..] {
        if d.data.ids() != first.data.ids() || d.data.labels() != first.data.labels() {
            return Err(Error::data(format!(
                "representation `{}` does not list the same examples as `{}`",
                d.name, first.name
            )));
        }
    }

    let refs: Vec<&Dataset> = datasets.iter().map(|d| &d.data).collect();
    let outcome = dedup(&refs, params.dedup_tolerance, params.dedup)?;
    let keep: std::collections::HashSet<&str> = outcome.kept.iter().map(String::as_str).collect();
    let deduped: Vec<NamedDataset> = datasets
        .iter()
        .map(|d| NamedDataset::new(d.name.clone(), d.data.retain_ids(&keep)))
        .collect();
    let base = &deduped[0].data;
    let pos = base.labels().iter().filter(|&&y| y > 0.0).count();
    let neg = base.n() - pos;

    let n_used = match params.n_target {
        Some(t) => {
            let cap = 2 * pos.min(neg);
            if cap < 2 {
                return Err(Error::data(format!(
                    "after deduplication class `{}` has {pos} and class `{}` has {neg} examples; \
                     both need at least one",
                    base.classes()[0],
                    base.classes()[1]
                )));
            }
            t.min(cap)
        }
        None => base.n(),
    };
    let expected_overlap = match params.n_target {
        Some(_) => 0.5 * ((n_used / 2) as f64 / pos as f64 + (n_used / 2) as f64 / neg as f64),
        None => 1.0,
    };

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let mut replicates = Vec::with_capacity(params.replicates);
    let mut timings = Vec::new();
    for r in 0..params.replicates {
        let subsample_seed = derive_seed(params.seed, &[SUBSAMPLE_STREAM, r as u64]);
        let indices: Option<Vec<usize>> = match params.n_target {
            Some(_) => Some(balanced_indices(base.labels(), n_used, subsample_seed)?),
            None => None,
        };
        let mut runs = Vec::with_capacity(deduped.len());
        for (k, nd) in deduped.iter().enumerate() {
            let data = match &indices {
                Some(idx) => nd.data.select(idx),
                None => nd.data.clone(),
            };
            let sampling_seed = derive_seed(params.seed, &[LABELING_STREAM, r as u64, k as u64]);
            let wrap = |e: Error| Error::Run {
                representation: nd.name.clone(),
                replicate: r,
                source: Box::new(e),
            };
            let (report, artifacts, t) =
                run_one(r, &nd.name, data, sampling_seed, params).map_err(wrap)?;
            if let Some(dir) = out_dir {
                write_run_plot_data(&run_dir(dir, r, &nd.name), &artifacts).map_err(wrap)?;
            }
            timings.push(TimingEntry {
                replicate: r,
                representation: nd.name.clone(),
                timings: t,
            });
            runs.push(report);
        }
        replicates.push(ReplicateReport {
            replicate: r,
            subsample_seed,
            n: n_used,
            expected_overlap_with_other_replicate: expected_overlap,
            runs,
        });
    }

    let report = AlignmentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        settings: ReportSettings {
            representations: datasets.iter().map(|d| d.name.clone()).collect(),
            n_target: params.n_target,
            num_replicates: params.replicates,
            sampling_mode: params.mode.as_str().into(),
            random_labelings: params.random_labelings,
            epsilon: params.epsilon,
            confidence_delta: params.delta,
            seed: params.seed,
            dedup_mode: match params.dedup {
                DedupMode::DropAll => "drop-all".into(),
                DedupMode::KeepFirst => "keep-first".into(),
            },
            dedup_tolerance: params.dedup_tolerance,
            top_k: params.top_k,
        },
        input: InputSummary {
            examples_loaded: first.data.n(),
            duplicates_dropped: outcome.dropped.len(),
            duplicate_groups: outcome.groups,
            examples_after_dedup: base.n(),
            classes: base.classes().clone(),
            class_counts_after_dedup: [pos, neg],
        },
        aggregates: aggregate(&deduped, &replicates),
        replicates,
    };

    if let Some(dir) = out_dir {
        write_json(&dir.join("report.json"), &report)?;
        write_json(&dir.join("timings.json"), &timings)?;
        if !outcome.dropped.is_empty() {
            let p = dir.join("dropped_ids.txt");
            fs::write(&p, outcome.dropped.join("\n") + "\n").map_err(|e| Error::io(&p, e))?;
        }
    }
    Ok(report)
}

fn run_one(
    replicate: usize,
    name: &str,
    data: Dataset,
    sampling_seed: u64,
    params: &AnalysisParams,
) -> Result<(RunReport, RunArtifacts, RunTimings)> {
    let t0 = Instant::now();
    let gram = build_gram_blocked(&data, params.block_rows)?;
    let t1 = Instant::now();
    let spectrum = decompose(&gram)?;
    drop(gram);
    let t2 = Instant::now();

    let real = ddc(&spectrum, data.labels())?;
    let bounds = ddc_bounds(&spectrum);
    let epsilon = params
        .epsilon
        .unwrap_or(crate::baseline::DEFAULT_RELATIVE_EPSILON * real.ddc);
    let hoeffding_m = hoeffding_sample_count(bounds.range.max(0.0), epsilon, params.delta)?;
    let m = match (params.random_labelings, params.epsilon) {
        (Some(m), _) => m,
        (None, Some(_)) => hoeffding_m.min(DEFAULT_MAX_SAMPLES),
        (None, None) => default_sample_count(&bounds, real.ddc)?,
    };
    let random = sample_baseline(&spectrum, m, params.mode, sampling_seed)?;
    let baseline = calibrate(real.ddc, random.ddc.clone(), params.delta)?;
    let t3 = Instant::now();

    for v in std::iter::once(&real.ddc).chain(&random.ddc) {
        if !bounds.contains(*v, BOUND_SLACK) {
            return Err(Error::Numeric(format!(
                "DDC {v} outside spectral bounds [{}, {}]",
                bounds.lower, bounds.upper
            )));
        }
    }

    let n = data.n();
    let top_k = params.top_k.min(n);
    let (min, max) = random
        .ddc
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let report = RunReport {
        representation: name.to_string(),
        dim: data.dim(),
        n,
        sampling_seed,
        real_ddc: real.ddc,
        baseline: BaselineSummary {
            mode: params.mode.as_str().into(),
            m,
            mean: baseline.mean,
            std: baseline.std,
            min,
            max,
            ratio: Metric(baseline.ratio),
            zscore: Metric(baseline.zscore),
            ecdf_at_real: baseline.ecdf_at_real,
            dkw_gamma: baseline.dkw_gamma,
            f_interval: [baseline.f_interval.0, baseline.f_interval.1],
        },
        spectrum: SpectrumSummary {
            lambda_max: spectrum.lambda_max(),
            lambda_min: spectrum.lambda_min(),
            ddc_lower_bound: bounds.lower,
            ddc_upper_bound: bounds.upper,
            ddc_range: bounds.range,
            top_k,
            variance_explained_top_k: variance_explained(&spectrum, top_k)?,
            jensen_upper_bound: jensen_upper_bound(&spectrum),
        },
        sample_count: SampleCountSummary {
            epsilon,
            confidence_delta: params.delta,
            hoeffding_m,
            m_used: m,
            epsilon_at_m_used: bounds.range.max(0.0)
                * ((2.0 / params.delta).ln() / (2.0 * m as f64)).sqrt(),
        },
    };
    let timings = RunTimings {
        gram_secs: (t1 - t0).as_secs_f64(),
        eigen_secs: (t2 - t1).as_secs_f64(),
        sampling_secs: (t3 - t2).as_secs_f64(),
    };
    let artifacts = RunArtifacts {
        replicate,
        representation: name.to_string(),
        dataset: data,
        spectrum,
        real,
        random,
        baseline,
    };
    Ok((report, artifacts, timings))
}

fn aggregate(
    datasets: &[NamedDataset],
    replicates: &[ReplicateReport],
) -> Vec<RepresentationAggregate> {
    datasets
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let runs: Vec<&RunReport> = replicates.iter().map(|r| &r.runs[k]).collect();
            let collect =
                |f: &dyn Fn(&RunReport) -> f64| runs.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (real_mean, real_std) = mean_std(&collect(&|r| r.real_ddc));
            let (ratio_mean, ratio_std) = mean_std(&collect(&|r| r.baseline.ratio.0));
            let (z_mean, z_std) = mean_std(&collect(&|r| r.baseline.zscore.0));
            RepresentationAggregate {
                representation: d.name.clone(),
                replicates: runs.len(),
                real_ddc_mean: real_mean,
                real_ddc_std: real_std,
                ratio_mean: Metric(ratio_mean),
                ratio_std: Metric(ratio_std),
                zscore_mean: Metric(z_mean),
                zscore_std: Metric(z_std),
            }
        })
        .collect()
}

pub fn run_dir(out_dir: &Path, replicate: usize, representation: &str) -> PathBuf {
    out_dir
        .join(format!("replicate-{replicate}"))
        .join(representation)
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numeric(format!("cannot serialize {}: {e}", path.display())))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Writes the report plus every run's plot tables under `out_dir`.
pub fn emit_plot_data(
    out_dir: &Path,
    report: &AlignmentReport,
    runs: &[RunArtifacts],
) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for a in runs {
        write_run_plot_data(&run_dir(out_dir, a.replicate, &a.representation), a)?;
    }
    write_json(&out_dir.join("report.json"), report)
}

/// Writes `pca.csv`, `eigenvalues.csv`, `projections.csv` and `histogram.csv`.
pub fn write_run_plot_data(dir: &Path, a: &RunArtifacts) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let d = &a.dataset;

    let mut w = CsvWriter::create(
        &dir.join("pca.csv"),
        &["id", "label", "class", "pc1", "pc2"],
    )?;
    for (i, p) in pca_coords(&a.spectrum)?.iter().enumerate() {
        let y = d.labels()[i];
        w.raw_row([
            d.ids()[i].clone(),
            format!("{y}"),
            d.class_name(y).to_string(),
            format!("{}", p[0]),
            format!("{}", p[1]),
        ])?;
    }
    w.finish()?;

    let mut w = CsvWriter::create(&dir.join("eigenvalues.csv"), &["index", "eigenvalue"])?;
    for (k, l) in a.spectrum.eigenvalues().iter().enumerate() {
        w.raw_row([k.to_string(), format!("{l}")])?;
    }
    w.finish()?;

    let mut w = CsvWriter::create(
        &dir.join("projections.csv"),
        &[
            "index",
            "eigenvalue",
            "real_projection",
            "real_scaled_contribution",
            "random_mean_squared_projection",
            "random_mean_scaled_contribution",
        ],
    )?;
    for (k, l) in a.spectrum.eigenvalues().iter().enumerate() {
        w.raw_row([
            k.to_string(),
            format!("{l}"),
            format!("{}", a.real.projections[k]),
            format!("{}", a.real.scaled_contributions[k]),
            format!("{}", a.random.mean_squared_projections[k]),
            format!("{}", a.random.mean_scaled_contributions[k]),
        ])?;
    }
    w.finish()?;

    let mut w = CsvWriter::create(
        &dir.join("histogram.csv"),
        &["kind", "bin_left", "bin_right", "count"],
    )?;
    for b in histogram(&a.baseline.samples, a.baseline.real_ddc) {
        w.raw_row([
            "random".to_string(),
            format!("{}", b.left),
            format!("{}", b.right),
            b.count.to_string(),
        ])?;
    }
    let r = a.baseline.real_ddc;
    w.raw_row([
        "real_ddc".to_string(),
        format!("{r}"),
        format!("{r}"),
        "1".to_string(),
    ])?;
    w.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Two Gaussian blobs separated along x; x-only and y-only projections.
    Blobs,
    /// Gaussian classes plus one near-duplicate pair, with agreeing and
    /// disagreeing pair labels.
    DuplicatePair,
}

/// Feature dimension of the duplicate-pair base dataset.
pub const DUPLICATE_PAIR_BASE_DIM: usize = 20;

/// Generates a synthetic scenario, writes its datasets as DDCM matrices and
/// label files under `out_dir/data`, and analyzes it on all examples.
/// Returns one report per variant (`blobs`; or `agree` and `disagree`).
pub fn run_synth(
    scenario: Scenario,
    n: usize,
    separation: f64,
    params: &AnalysisParams,
    out_dir: &Path,
) -> Result<Vec<(String, AlignmentReport)>> {
    let variants: Vec<(String, Vec<NamedDataset>)> = match scenario {
        Scenario::Blobs => {
            let (x, y) = synth_blobs(n, separation, BlobAxis::X, params.seed)?;
            vec![(
                "blobs".into(),
                vec![
                    NamedDataset::new("x-only", x),
                    NamedDataset::new("y-only", y),
                ],
            )]
        }
        Scenario::DuplicatePair => {
            let base = synth_gaussian_classes(n, DUPLICATE_PAIR_BASE_DIM, separation, params.seed)?;
            ["agree", "disagree"]
                .into_iter()
                .map(|v| {
                    let d = inject_duplicate_pair(&base, v == "agree")?;
                    Ok((v.to_string(), vec![NamedDataset::new("dense", d)]))
                })
                .collect::<Result<_>>()?
        }
    };
    let mut out = Vec::with_capacity(variants.len());
    for (variant, datasets) in variants {
        let dir = match scenario {
            Scenario::Blobs => out_dir.to_path_buf(),
            Scenario::DuplicatePair => out_dir.join(&variant),
        };
        let data_dir = dir.join("data");
        fs::create_dir_all(&data_dir).map_err(|e| Error::io(&data_dir, e))?;
        for nd in &datasets {
            let d = &nd.data;
            io::write_ddcm(
                &data_dir.join(format!("{}.ddcm", nd.name)),
                d.n(),
                d.dim(),
                d.rows(),
            )?;
        }
        let first = &datasets[0].data;
        let labels: Vec<String> = first
            .labels()
            .iter()
            .map(|&y| first.class_name(y).to_string())
            .collect();
        io::write_labels(&data_dir.join("labels.txt"), &labels)?;
        let report = analyze(&datasets, params, Some(&dir))?;
        out.push((variant, report));
    }
    Ok(out)
}

/// Reads the `eigenvalue` column of an `eigenvalues.csv` file, or a
/// headerless file with one value per line.
pub fn read_eigenvalues_csv(path: &Path) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::data(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::io(path, e.into()))?;
    let mut records = reader.records();
    let first = records
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let (col, mut out) = match first.iter().position(|c| c == "eigenvalue") {
        Some(c) => (c, Vec::new()),
        None => match (first.len(), first.get(0).map(str::parse::<f64>)) {
            (1, Some(Ok(v))) => (0, vec![v]),
            _ => return Err(bad("no `eigenvalue` column".into())),
        },
    };
    for (row, rec) in records.enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = rec.get(col).unwrap_or("");
        let v: f64 = field
            .parse()
            .map_err(|_| bad(format!("bad eigenvalue `{field}` on data row {}", row + 1)))?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(bad("no eigenvalues".into()));
    }
    Ok(out)
}
