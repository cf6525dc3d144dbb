mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use woodleaf::io::CloudFileFormat;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  bad usage or invalid parameter
  2  I/O or parse failure, including label files of different lengths
  3  pipeline failure (for example an empty training class)";

/// Separate wood from leaf points in single-tree terrestrial laser scans.
#[derive(Debug, Parser)]
#[command(name = "woodleaf", version, after_help = EXIT_CODES)]
pub struct Cli {
    /// Log more detail to stderr (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one or more clouds and write predicted labels.
    #[command(after_help = EXIT_CODES)]
    Classify(ClassifyArgs),
    /// Score predicted labels against reference labels.
    #[command(after_help = EXIT_CODES)]
    Evaluate(EvaluateArgs),
    /// Generate a synthetic scanned tree with ground-truth labels.
    #[command(after_help = EXIT_CODES)]
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Input cloud. Repeat to classify several files.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,

    /// Label file for a single input, or a directory for several inputs.
    #[arg(long)]
    pub output: PathBuf,

    /// Input format: xyzi, ply-ascii or ply-binary. Inferred from the extension when omitted.
    #[arg(long)]
    pub format: Option<CloudFileFormat>,

    /// Scanner position in the cloud's frame.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    pub scanner_pos: Option<Vec<f64>>,

    /// Scanner angular step, radians.
    #[arg(long, required_unless_present = "estimate_step", conflicts_with = "estimate_step")]
    pub angular_step: Option<f64>,

    /// Estimate the angular step from the cloud instead of passing it.
    #[arg(long)]
    pub estimate_step: bool,

    /// Reference labels; adds an accuracy report. Single input only.
    #[arg(long)]
    pub reference: Option<PathBuf>,

    /// Also write a binary PLY colored by predicted class next to each label file.
    #[arg(long)]
    pub colored_ply: bool,

    /// Clouds classified concurrently (0 uses every core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,

    #[command(flatten)]
    pub params: ParamArgs,
}

/// Overrides for the classifier parameters; each defaults to the published value.
#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    /// Random seed for sphere sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampling spheres.
    #[arg(long)]
    pub n_seeds: Option<usize>,
    /// Sampling sphere radius, m.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Neighbors per point in the spacing test.
    #[arg(long)]
    pub k: Option<usize>,
    /// Spacing ratio at or below which a point stays wood.
    #[arg(long)]
    pub thr: Option<f64>,
    /// Voxel grid divisions per axis.
    #[arg(long)]
    pub divisions: Option<usize>,
    /// Voxel density ratio below which a voxel is leaf.
    #[arg(long)]
    pub voxel_ratio: Option<f64>,
    /// Search radius multiplier in the upper verification region.
    #[arg(long)]
    pub sd1: Option<f64>,
    /// Spacing multiplier in the upper verification region.
    #[arg(long)]
    pub sd2: Option<f64>,
    /// Height fraction splitting lower and upper verification regions.
    #[arg(long)]
    pub height_fraction: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Predicted label file.
    #[arg(long)]
    pub labels: PathBuf,

    /// Reference label file.
    #[arg(long)]
    pub reference: PathBuf,

    /// Write the report as key=value lines here as well.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Classification time to include in the report, ms.
    #[arg(long)]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Cloud file to write.
    #[arg(long)]
    pub output: PathBuf,

    /// Ground-truth label file. Defaults to the output path with a `.labels` extension.
    #[arg(long)]
    pub labels: Option<PathBuf>,

    /// Output format: xyzi, ply-ascii or ply-binary. Inferred from the extension when omitted.
    #[arg(long)]
    pub format: Option<CloudFileFormat>,

    /// Scanner position written into the cloud's frame.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    pub scanner_pos: Option<Vec<f64>>,

    /// Angular step of the simulated scanner, radians.
    #[arg(long)]
    pub angular_step: Option<f64>,

    /// Generator seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    init_logging(cli.verbose);
    let result = match &cli.command {
        Command::Classify(args) => commands::run_classify(args),
        Command::Evaluate(args) => commands::run_evaluate(args),
        Command::Synth(args) => commands::run_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
