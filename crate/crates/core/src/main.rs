use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ddc_align::baseline::{
    dkw_gamma, hoeffding_sample_count, SamplingMode, DEFAULT_CONFIDENCE_DELTA,
};
use ddc_align::ingest::{DedupMode, DEFAULT_DEDUP_TOLERANCE};
use ddc_align::pipeline::{
    self, AnalysisParams, InputSource, ReprKind, RunConfig, Scenario, DEFAULT_N_TARGET,
    DEFAULT_REPLICATES, DEFAULT_SEED, DEFAULT_TOP_K,
};
use ddc_align::report::AlignmentReport;
use ddc_align::spectral::{bounds_from_extremes, jensen_from_eigenvalues, SINGULARITY_FLOOR};
use ddc_align::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ddc-align",
    version,
    about = "Representation/label alignment via data-dependent complexity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a corpus or embedding matrix under one or more representations.
    Compute(ComputeArgs),
    /// Generate and analyze a synthetic scenario.
    Synth(SynthArgs),
    /// Print the DDC range, Hoeffding sample count, DKW width and Jensen bound
    /// for a list of eigenvalues.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Iid,
    Balanced,
}

impl From<ModeArg> for SamplingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Iid => SamplingMode::Iid,
            ModeArg::Balanced => SamplingMode::Balanced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DedupArg {
    DropAll,
    KeepFirst,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Blobs,
    DuplicatePair,
}

#[derive(Args)]
struct SamplingArgs {
    /// Number of random labelings (default: Hoeffding count, at least 500, at most 10000).
    #[arg(long)]
    random_labelings: Option<usize>,
    /// Absolute Hoeffding accuracy used to size the baseline.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE_DELTA)]
    delta: f64,
    #[arg(long, value_enum, default_value = "iid")]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
}

#[derive(Args)]
struct ComputeArgs {
    /// JSON-lines corpus with `id`, `label` and `text` or `vector`.
    #[arg(long, conflicts_with_all = ["embeddings", "labels"], required_unless_present = "embeddings")]
    corpus: Option<PathBuf>,
    /// DDCM embedding matrix, one row per example.
    #[arg(long, requires = "labels")]
    embeddings: Option<PathBuf>,
    /// One label per line, aligned with the rows of --embeddings.
    #[arg(long, requires = "embeddings")]
    labels: Option<PathBuf>,
    /// Static word-vector table for mean-static.
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// bow | mean-static | dense | coords:i,j (repeatable).
    #[arg(long = "repr", required = true)]
    repr: Vec<String>,
    #[arg(long = "token-pattern")]
    token_pattern: Option<String>,
    #[arg(long, default_value_t = DEFAULT_N_TARGET)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long, value_enum, default_value = "drop-all")]
    dedup: DedupArg,
    #[arg(long, default_value_t = DEFAULT_DEDUP_TOLERANCE)]
    dedup_tolerance: f64,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 6.0)]
    separation: f64,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    /// CSV with an `eigenvalue` column, or one value per line.
    #[arg(long)]
    eigenvalues: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE_DELTA)]
    delta: f64,
    /// Number of samples for the DKW width (default: the Hoeffding count).
    #[arg(long)]
    m: Option<usize>,
}

fn params(s: &SamplingArgs) -> AnalysisParams {
    AnalysisParams {
        mode: s.mode.into(),
        random_labelings: s.random_labelings,
        epsilon: s.epsilon,
        delta: s.delta,
        seed: s.seed,
        top_k: s.top_k,
        ..Default::default()
    }
}

fn print_summary(label: &str, report: &AlignmentReport) {
    for agg in &report.aggregates {
        println!(
            "{label}{}: real DDC {:.6} (sd {:.3e}), ratio {:.4} (sd {:.3e}), z {:.3} (sd {:.3e}) over {} replicate(s)",
            agg.representation,
            agg.real_ddc_mean,
            agg.real_ddc_std,
            agg.ratio_mean.0,
            agg.ratio_std.0,
            agg.zscore_mean.0,
            agg.zscore_std.0,
            agg.replicates
        );
    }
}

fn compute(a: ComputeArgs) -> Result<()> {
    let input = match (a.corpus, a.embeddings, a.labels) {
        (Some(c), None, None) => InputSource::Corpus(c),
        (None, Some(matrix), Some(labels)) => InputSource::Embeddings { matrix, labels },
        _ => {
            return Err(Error::Config(
                "give either --corpus or both --embeddings and --labels".into(),
            ))
        }
    };
    let representations = a
        .repr
        .iter()
        .map(|r| ReprKind::parse(r))
        .collect::<Result<Vec<_>>>()?;
    let config = RunConfig {
        input,
        vectors: a.vectors,
        representations,
        token_pattern: a.token_pattern,
        params: AnalysisParams {
            n_target: Some(a.n),
            replicates: a.replicates,
            dedup: match a.dedup {
                DedupArg::DropAll => DedupMode::DropAll,
                DedupArg::KeepFirst => DedupMode::KeepFirst,
            },
            dedup_tolerance: a.dedup_tolerance,
            ..params(&a.sampling)
        },
        out_dir: a.out.clone(),
    };
    let report = pipeline::run(&config)?;
    println!(
        "{} examples loaded, {} dropped as duplicates, n = {} per replicate",
        report.input.examples_loaded,
        report.input.duplicates_dropped,
        report.replicates.first().map_or(0, |r| r.n)
    );
    print_summary("", &report);
    println!("wrote {}", a.out.join("report.json").display());
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let scenario = match a.scenario {
        ScenarioArg::Blobs => Scenario::Blobs,
        ScenarioArg::DuplicatePair => Scenario::DuplicatePair,
    };
    let params = AnalysisParams {
        n_target: None,
        replicates: 1,
        ..params(&a.sampling)
    };
    for (variant, report) in pipeline::run_synth(scenario, a.n, a.separation, &params, &a.out)? {
        print_summary(&format!("{variant}/"), &report);
    }
    println!("wrote {}", a.out.display());
    Ok(())
}

fn bounds(a: BoundsArgs) -> Result<()> {
    let mut values = pipeline::read_eigenvalues_csv(&a.eigenvalues)?;
    values.sort_by(|x, y| y.total_cmp(x));
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Data(format!(
            "eigenvalues must be positive and finite, found {bad}"
        )));
    }
    let n = values.len();
    let (lmax, lmin) = (values[0], values[n - 1]);
    if lmin <= SINGULARITY_FLOOR * lmax {
        return Err(Error::NearSingular {
            lambda_min: lmin,
            floor: SINGULARITY_FLOOR * lmax,
        });
    }
    let b = bounds_from_extremes(lmax, lmin);
    let m = hoeffding_sample_count(b.range, a.epsilon, a.delta)?;
    let gamma = dkw_gamma(a.m.unwrap_or(m), a.delta)?;
    println!("n               {n}");
    println!("lambda_max      {}", lmax);
    println!("lambda_min      {}", lmin);
    println!("ddc_lower       {}", b.lower);
    println!("ddc_upper       {}", b.upper);
    println!("delta_range     {}", b.range);
    println!("hoeffding_m     {m}");
    println!("dkw_gamma       {gamma}");
    println!("jensen_bound    {}", jensen_from_eigenvalues(&values));
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("DDC_THREADS") else {
        return Ok(());
    };
    let threads: usize = v.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::Config(format!("DDC_THREADS must be a positive integer, got `{v}`"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Compute(a) => compute(a),
        Command::Synth(a) => synth(a),
        Command::Bounds(a) => bounds(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
