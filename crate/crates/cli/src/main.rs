//! Command-line front end for the co-offender network toolkit.
//!
//! Exit codes: 0 success, 2 usage or configuration problems, 3 rejected
//! input data, 4 runtime failures such as unwritable output paths.

mod commands;
mod settings;

use std::path::PathBuf;
use std::str::FromStr;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use settings::{pick, Settings};

#[derive(Parser)]
#[command(name = "conet", version, about = "Co-offender network analysis toolkit")]
struct Cli {
    /// Flat key=value settings file; explicit flags always win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for parallel stages; 0 sizes to the machine
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic arrest history and its summary statistics
    Synth(SynthArgs),
    /// Validate an arrest CSV and print a short inventory
    Ingest(IngestArgs),
    /// Build the co-offender graph and report its structure
    GraphStats(GraphStatsArgs),
    /// Extract the per-offender feature matrix
    Features(FeaturesArgs),
    /// Produce a watchlist from one of the reference heuristics
    #[command(subcommand)]
    Baseline(BaselineCommand),
    /// Train and score classifiers under an evaluation protocol
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Merge evaluation reports into a single document
    Report(ReportArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of offenders to simulate
    #[arg(long)]
    offenders: Option<usize>,
    /// Length of the simulated period in months
    #[arg(long)]
    months: Option<u32>,
    /// First day of the simulated period
    #[arg(long)]
    start: Option<NaiveDate>,
    /// Number of crews seeding the social structure
    #[arg(long)]
    gangs: Option<usize>,
    /// Mean degree the co-offender graph is tuned toward
    #[arg(long = "mean-degree")]
    mean_degree: Option<f64>,
    /// Fraction of arrest records that carry a violent charge
    #[arg(long = "violent-fraction")]
    violent_fraction: Option<f64>,
    /// How sharply violence concentrates around the seeded offenders
    #[arg(long = "contagion-strength")]
    contagion_strength: Option<f64>,
    /// Relative size of the summer peak in arrest volume
    #[arg(long)]
    seasonality: Option<f64>,
    /// Random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Directory receiving arrests.csv and stats.json
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// Arrest CSV to validate
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct GraphStatsArgs {
    /// Arrest CSV to analyze
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Arrest CSV to featurize
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Hide each offender's own violence from their feature row
    #[arg(long = "mask-own-labels", value_name = "BOOL")]
    mask_own_labels: Option<bool>,
    /// Restrict the graph to arrests in FROM..TO (inclusive)
    #[arg(long, value_name = "FROM..TO")]
    window: Option<String>,
    /// Add one violence share column per crime code
    #[arg(long = "per-crime")]
    per_crime: bool,
    /// Comma-separated subset of feature columns to emit
    #[arg(long, value_name = "LIST")]
    columns: Option<String>,
    /// Random seed for the embedding stage
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum BaselineCommand {
    /// Offenders with a violent arrest on record
    Pva(PvaArgs),
    /// Offenders within two hops of a homicide victim
    Thh(ThhArgs),
}

#[derive(Args)]
struct PvaArgs {
    /// Arrest CSV to scan
    #[arg(long)]
    input: Option<PathBuf>,
    /// Day the list is drawn up; defaults to the last date on file
    #[arg(long = "as-of")]
    as_of: Option<NaiveDate>,
    /// Only count violent arrests in the trailing window of this many days
    #[arg(long = "delta-days")]
    delta_days: Option<i64>,
    /// Output path for the watchlist
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThhArgs {
    /// Arrest CSV to scan
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output path for the watchlist
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Stratified cross-validation on the full-history network
    Kfold(KfoldArgs),
    /// Month-by-month evaluation as the network emerges
    Temporal(TemporalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifierArg {
    Rf,
    Dt,
}

impl FromStr for ClassifierArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rf" => Ok(ClassifierArg::Rf),
            "dt" => Ok(ClassifierArg::Dt),
            other => Err(format!("expected `rf` or `dt`, got `{other}`")),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PoolArg {
    All,
    RecentlyActive,
}

impl FromStr for PoolArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(PoolArg::All),
            "recently-active" => Ok(PoolArg::RecentlyActive),
            other => Err(format!("expected `all` or `recently-active`, got `{other}`")),
        }
    }
}

#[derive(Args)]
struct ClassifierFlags {
    /// Model family to train
    #[arg(long)]
    classifier: Option<ClassifierArg>,
    /// Forest size when the classifier is rf
    #[arg(long)]
    trees: Option<usize>,
    /// Depth cap for each tree; unlimited when absent
    #[arg(long = "max-depth")]
    max_depth: Option<usize>,
    /// Minimum samples in a leaf
    #[arg(long = "min-leaf")]
    min_leaf: Option<usize>,
    /// Oversample the minority class before training
    #[arg(long, value_name = "BOOL")]
    smote: Option<bool>,
    /// Neighbors consulted per synthetic sample
    #[arg(long = "smote-k")]
    smote_k: Option<usize>,
    /// Synthetic rows per minority row; balanced classes when absent
    #[arg(long = "smote-amount")]
    smote_amount: Option<f64>,
}

#[derive(Args)]
struct KfoldArgs {
    /// Arrest CSV to evaluate on
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    classifier: ClassifierFlags,
    /// Number of folds
    #[arg(long)]
    folds: Option<usize>,
    /// Random seed for folding, resampling, and training
    #[arg(long)]
    seed: Option<u64>,
    /// Baselines to score alongside the classifier (thh)
    #[arg(long, value_name = "LIST")]
    compare: Option<String>,
    /// Report path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for plot-ready CSVs; defaults to the report's directory
    #[arg(long = "plot-dir")]
    plot_dir: Option<PathBuf>,
}

#[derive(Args)]
struct TemporalArgs {
    /// Arrest CSV to evaluate on
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    classifier: ClassifierFlags,
    /// First evaluation month, counted from the start of the data
    #[arg(long = "start-month")]
    start_month: Option<usize>,
    /// Days ahead that count as the near future
    #[arg(long = "frf-days")]
    frf_days: Option<i64>,
    /// Who is eligible for the monthly watchlist
    #[arg(long)]
    pool: Option<PoolArg>,
    /// Trailing window for the past-violence baseline, in days
    #[arg(long = "pva-window-days")]
    pva_window_days: Option<i64>,
    /// Baselines to score alongside the classifier (pva, thh)
    #[arg(long, value_name = "LIST")]
    compare: Option<String>,
    /// Random seed for resampling and training
    #[arg(long)]
    seed: Option<u64>,
    /// Report path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for plot-ready CSVs; defaults to the report's directory
    #[arg(long = "plot-dir")]
    plot_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Evaluation reports to merge
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Merged output path
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &conet::Error) -> i32 {
    match e {
        conet::Error::Config(_) => 2,
        conet::Error::Parse { .. }
        | conet::Error::Validation(_)
        | conet::Error::UnknownOffender(_) => 3,
        conet::Error::Compute(_) | conet::Error::Io(_) => 4,
    }
}

fn run(cli: Cli) -> conet::Result<()> {
    let mut settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::empty(),
    };
    let threads = pick(cli.threads, &mut settings, "threads", 0usize)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| conet::Error::config(format!("cannot size thread pool: {e}")))?;
    }
    match cli.command {
        Command::Synth(a) => commands::synth(a, &mut settings, threads)?,
        Command::Ingest(a) => commands::ingest(a, &mut settings)?,
        Command::GraphStats(a) => commands::graph_stats(a, &mut settings, threads)?,
        Command::Features(a) => commands::features(a, &mut settings)?,
        Command::Baseline(BaselineCommand::Pva(a)) => commands::baseline_pva(a, &mut settings)?,
        Command::Baseline(BaselineCommand::Thh(a)) => commands::baseline_thh(a, &mut settings)?,
        Command::Eval(EvalCommand::Kfold(a)) => commands::eval_kfold(a, &mut settings, threads)?,
        Command::Eval(EvalCommand::Temporal(a)) => {
            commands::eval_temporal(a, &mut settings, threads)?
        }
        Command::Report(a) => commands::report(a, &mut settings)?,
    }
    settings.warn_unused();
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
