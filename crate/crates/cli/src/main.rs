//! Command line interface: generate pseudo-data, simulate missing values,
//! impute, run full studies from a YAML config, and render missingness
//! diagnostics.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mvibench::ampute::{
    ampute, read_mask_csv, write_mask_csv, AmputationSpec, AmputedDataset, MissingMechanism,
    MissingPattern,
};
use mvibench::impute::{impute, ImputationMethod, ImputeOptions};
use mvibench::neural::TrainParams;
use mvibench::pipeline::{load_config, persist_results, run_study};
use mvibench::synth::{generate_blobs, generate_personpseudo, BlobSpec};
use mvibench::tabular::{infer_schema, load_csv, load_csv_allow_missing, write_csv};
use mvibench::viz::{
    aggregation_plot, matrix_plot, parallel_boxplot, PlotKind, PlotSpec, BW_HIGHLIGHT,
};

#[derive(Parser)]
#[command(name = "mvibench", version, about = "Missing-value imputation benchmark toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate clustered Gaussian pseudo-data and write it as CSV.
    Generate(GenerateArgs),
    /// Simulate missing values on a complete CSV file.
    Ampute(AmputeArgs),
    /// Fill (or delete) the missing cells of a masked CSV file.
    Impute(ImputeArgs),
    /// Run a full study from a YAML configuration.
    Run(RunArgs),
    /// Render a missingness diagnostic as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of rows.
    #[arg(long, default_value_t = 1000)]
    rows: usize,
    /// Number of numeric feature columns.
    #[arg(long, default_value_t = 6)]
    features: usize,
    /// Number of binned categorical feature columns.
    #[arg(long, default_value_t = 0)]
    categorical: usize,
    /// Number of clusters (classes).
    #[arg(long, default_value_t = 5)]
    clusters: usize,
    /// Cluster dispersion (isotropic standard deviation).
    #[arg(long, default_value_t = 1.0)]
    std: f64,
    /// Shared feature value range.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 10.0])]
    range: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the person-shaped preset columns instead of generic features.
    #[arg(long)]
    preset_personpseudo: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AmputeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    pattern: PatternArg,
    #[arg(long, value_enum)]
    mechanism: MechanismArg,
    /// Target row-wise missing rate in [0, 1).
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target column name (default: last categorical column).
    #[arg(long)]
    target: Option<String>,
    /// Masked data output; missing cells become empty fields.
    #[arg(long)]
    out: PathBuf,
    /// 0/1 mask matrix output with the same shape and header.
    #[arg(long)]
    mask: PathBuf,
}

#[derive(Args)]
struct ImputeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    /// mean | median | knn:K | mice[:ITER[:TOL]] | multiplemlp:H1-H2 |
    /// zerofill | delete
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target column name (default: last categorical column).
    #[arg(long)]
    target: Option<String>,
    /// Allow the target column as an imputer input.
    #[arg(long)]
    use_target: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory for results.csv and friends.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for the case pool (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Matrix plot row ordering column.
    #[arg(long)]
    sort_by: Option<String>,
    /// Numeric column for the parallel boxplot.
    #[arg(long)]
    column: Option<String>,
    /// Target column name used for schema inference.
    #[arg(long)]
    target: Option<String>,
    /// Render missing cells in dark gray instead of red.
    #[arg(long)]
    bw: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    Univariate,
    Multivariate,
    Monotone,
    General,
}

impl From<PatternArg> for MissingPattern {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::Univariate => MissingPattern::Univariate,
            PatternArg::Multivariate => MissingPattern::Multivariate,
            PatternArg::Monotone => MissingPattern::Monotone,
            PatternArg::General => MissingPattern::General,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismArg {
    Mcar,
    Mar,
    Mnar,
}

impl From<MechanismArg> for MissingMechanism {
    fn from(m: MechanismArg) -> Self {
        match m {
            MechanismArg::Mcar => MissingMechanism::Mcar,
            MechanismArg::Mar => MissingMechanism::Mar,
            MechanismArg::Mnar => MissingMechanism::Mnar,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Aggregation,
    Matrix,
    Parallelbox,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Generate(args) => generate(args),
        Command::Ampute(args) => run_ampute(args),
        Command::Impute(args) => run_impute(args),
        Command::Run(args) => run(args),
        Command::Plot(args) => plot(args),
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    let (ds, map) = if args.preset_personpseudo {
        generate_personpseudo(args.rows, args.std, args.seed)?
    } else {
        let spec = BlobSpec::uniform(
            args.rows,
            args.features,
            args.clusters,
            args.std,
            (args.range[0], args.range[1]),
            args.seed,
        )
        .with_categorical(args.categorical, (args.range[0], args.range[1]));
        generate_blobs(&spec)?
    };
    write_csv(&ds, &map, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("wrote {} rows x {} columns to {}", ds.n_rows(), ds.n_cols(), args.out.display());
    Ok(())
}

fn run_ampute(args: AmputeArgs) -> Result<()> {
    let schema = infer_schema(&args.input, args.target.as_deref())?;
    let (ds, map) = load_csv(&args.input, &schema)
        .with_context(|| format!("loading {}", args.input.display()))?;
    let spec =
        AmputationSpec::new(args.pattern.into(), args.mechanism.into(), args.rate, args.seed);
    let amputed = ampute(&ds, &spec)?;
    write_csv(&amputed.data, &map, &args.out)?;
    write_mask_csv(&amputed.mask, &schema.names(), &args.mask)?;
    eprintln!(
        "amputed {} of {} rows (achieved rate {:.3}) -> {}",
        (0..amputed.mask.n_rows()).filter(|&r| amputed.mask.row_has_missing(r)).count(),
        ds.n_rows(),
        mvibench::ampute::achieved_missing_rate(&amputed.mask),
        args.out.display()
    );
    Ok(())
}

fn run_impute(args: ImputeArgs) -> Result<()> {
    let method: ImputationMethod =
        args.method.parse().map_err(|e: String| anyhow::anyhow!(e))?;
    let schema = infer_schema(&args.input, args.target.as_deref())?;
    let (ds, map) = load_csv_allow_missing(&args.input, &schema)?;
    let (mask, mask_header) = read_mask_csv(&args.mask)?;
    if mask_header != schema.names() {
        bail!("mask header does not match the data header");
    }
    let amputed = AmputedDataset::from_incomplete(ds, mask)?;
    let train = TrainParams { seed: args.seed, ..TrainParams::default() };
    let outcome = impute(&amputed, &method, &train, ImputeOptions { use_target: args.use_target })?;
    write_csv(&outcome.data, &map, &args.out)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "imputed with {} in {:.3}s ({} rows kept) -> {}",
        outcome.method,
        outcome.fit_seconds,
        outcome.kept_rows.len(),
        args.out.display()
    );
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let results = match args.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("building worker pool")?
            .install(|| run_study(&config)),
        None => run_study(&config),
    }?;
    let errors = results.iter().filter(|r| r.is_error()).count();
    let manifest = persist_results(&results, &config, &args.out)?;
    eprintln!(
        "{} result rows ({} errors) -> {} [config {}]",
        results.len(),
        errors,
        args.out.display(),
        &manifest.config_hash[..12]
    );
    Ok(())
}

fn plot(args: PlotArgs) -> Result<()> {
    let schema = infer_schema(&args.input, args.target.as_deref())?;
    let (ds, _) = load_csv_allow_missing(&args.input, &schema)?;
    let (mask, mask_header) = read_mask_csv(&args.mask)?;
    if mask_header != schema.names() {
        bail!("mask header does not match the data header");
    }
    let kind = match args.kind {
        KindArg::Aggregation => PlotKind::Aggregation,
        KindArg::Matrix => PlotKind::Matrix,
        KindArg::Parallelbox => PlotKind::ParallelBox,
    };
    let mut spec = PlotSpec::new(kind);
    spec.sort_by = args.sort_by;
    if args.bw {
        spec.highlight_color = BW_HIGHLIGHT.to_string();
    }
    let svg = match kind {
        PlotKind::Aggregation => aggregation_plot(&ds, &mask, &spec)?,
        PlotKind::Matrix => matrix_plot(&ds, &mask, &spec)?,
        PlotKind::ParallelBox => {
            let column = args
                .column
                .as_deref()
                .context("--column is required for the parallel boxplot")?;
            parallel_boxplot(&ds, &mask, column, &spec)?
        }
    };
    std::fs::write(&args.out, svg)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}
