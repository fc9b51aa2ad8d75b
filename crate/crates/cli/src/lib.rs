//! `seisfuzz` command-line front end.
//!
//! [`run`] parses arguments and executes one command in-process, returning
//! the process exit code: 0 on success, 2 for bad input data, 3 for bad
//! configuration or usage, 4 for numerical failures.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use seisfuzz_core::Error;

mod commands;
pub mod synth;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Default epoch count and step length for the fuzzy models.
pub const FUZZY_EPOCHS: usize = 50;
pub const FUZZY_LR: f64 = 0.01;
/// Default epoch count and step length for the network baseline.
pub const ANN_EPOCHS: usize = 300;
pub const ANN_LR: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "seisfuzz",
    version,
    about = "Neuro-fuzzy prediction of sand fraction from seismic attributes"
)]
pub struct Cli {
    /// More log output on standard error (repeat for debug detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge well logs with the seismic traces at the well locations.
    Prep(PrepArgs),
    /// Train a fuzzy model or the network baseline.
    Train(TrainArgs),
    /// Compute CC, RMSE, AEM and SI of a model on a dataset.
    Evaluate(EvaluateArgs),
    /// Predict sand fraction over a whole cube.
    Volume(VolumeArgs),
    /// Forward selection of predictor attributes.
    Select(SelectArgs),
    /// Write a synthetic survey with known ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    /// Well log CSV (`well_id,time_ms,sand_fraction`, extra columns kept).
    #[arg(long)]
    pub wells: PathBuf,
    /// Well trace positions (`well_id,inline,crossline`).
    #[arg(long)]
    pub locations: PathBuf,
    /// Attribute cubes in SFCUBE1 format.
    #[arg(long = "cube", required = true, num_args = 1..)]
    pub cubes: Vec<PathBuf>,
    /// Merged dataset CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Grid-partitioned fuzzy model.
    Grid,
    /// Fuzzy model seeded by subtractive clustering.
    Subtractive,
    /// Fuzzy model seeded by fuzzy c-means.
    Fcm,
    /// Single-hidden-layer network.
    Ann,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Membership functions per input for the grid model.
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    /// Clustering radius in unit-scaled data space.
    #[arg(long, default_value_t = 0.2)]
    pub radius: f64,
    /// Fixed cluster count for the FCM model (default: from subtractive clustering).
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Training epochs (default 50 for fuzzy models, 300 for the network).
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Step length (default 0.01 for fuzzy models, 0.05 for the network).
    #[arg(long)]
    pub lr: Option<f64>,
    /// Keep the step length fixed.
    #[arg(long)]
    pub fixed_lr: bool,
    /// Stop after this many epochs without a better test RMSE.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Hidden units of the network.
    #[arg(long, default_value_t = 10)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Training share of the random split.
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,
    /// Largest rule base the grid model may create.
    #[arg(long, default_value_t = seisfuzz_core::builder::DEFAULT_RULE_CAP)]
    pub rule_cap: usize,
    /// Predictor columns to use, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    pub attributes: Option<Vec<String>>,
    /// Model JSON output.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch `epoch,train_rmse,test_rmse` CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Final train/test metrics CSV.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Directory to receive `train.csv` and `test.csv`.
    #[arg(long)]
    pub save_split: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Model JSON.
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Add one row per well.
    #[arg(long)]
    pub per_well: bool,
    /// Value of the `model` column (default: model file stem).
    #[arg(long)]
    pub label: Option<String>,
    /// Output CSV (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    /// Model JSON.
    #[arg(long)]
    pub model: PathBuf,
    /// Attribute cubes in SFCUBE1 format.
    #[arg(long = "cube", required = true, num_args = 1..)]
    pub cubes: Vec<PathBuf>,
    /// Predicted property cube (SFCUBE1).
    #[arg(long)]
    pub out: PathBuf,
    /// Median-filter each inline (3 crosslines by 5 samples).
    #[arg(long)]
    pub smooth: bool,
    /// Inline to export as a CSV grid.
    #[arg(long)]
    pub slice: Option<usize>,
    /// Slice CSV path (default: next to --out).
    #[arg(long, requires = "slice")]
    pub slice_out: Option<PathBuf>,
    /// Well whose target log is written against the prediction at its trace.
    #[arg(long, requires_all = ["wells", "locations", "overlay_out"])]
    pub overlay: Option<String>,
    /// Well log CSV for the overlay.
    #[arg(long)]
    pub wells: Option<PathBuf>,
    /// Well locations CSV for the overlay.
    #[arg(long)]
    pub locations: Option<PathBuf>,
    /// Overlay CSV path.
    #[arg(long)]
    pub overlay_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Candidate columns, comma separated (default: all attributes).
    #[arg(long, value_delimiter = ',')]
    pub candidates: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,
    /// Trace CSV (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub wells: usize,
    #[arg(long, default_value_t = 64)]
    pub inlines: usize,
    #[arg(long, default_value_t = 64)]
    pub crosslines: usize,
    /// Time samples per trace.
    #[arg(long, default_value_t = 128)]
    pub samples: usize,
    /// First sample time, ms.
    #[arg(long, default_value_t = 1500.0)]
    pub t0: f64,
    /// Seismic sample interval, ms.
    #[arg(long, default_value_t = 2.0)]
    pub dt: f64,
    /// Well log sample interval, ms.
    #[arg(long, default_value_t = 0.5)]
    pub log_dt: f64,
    /// Target noise standard deviation.
    #[arg(long, default_value_t = 0.02)]
    pub noise: f64,
    /// Also write a pure-noise attribute cube.
    #[arg(long)]
    pub noise_attr: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. }
        | Error::Csv(_)
        | Error::Json(_)
        | Error::Parse(_)
        | Error::Dimension { .. }
        | Error::UnknownAttribute(_)
        | Error::AttributeMismatch { .. }
        | Error::OutOfRange { .. } => EXIT_INPUT,
        Error::Config(_) | Error::ParameterDomain(_) | Error::RuleExplosion { .. } => EXIT_CONFIG,
        Error::Numeric(_) | Error::DegenerateInput(_) | Error::Undefined { .. } => EXIT_NUMERIC,
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    match commands::execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
