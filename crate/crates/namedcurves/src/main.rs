//! Thin command-line front end; all behavior lives in `namedcurves::cli`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use namedcurves::cli::{self, FitOptions, TimingMode};

#[derive(Parser)]
#[command(
    name = "namedcurves",
    version,
    about = "Color-name guided tone curve enhancement"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write per-group probability maps and color-coded visualizations
    Decompose {
        /// Input PNG
        input: PathBuf,
        /// Directory for the 12 output PNGs
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// CNLUT table to use instead of the parametric model
        #[arg(long)]
        lut: Option<PathBuf>,
    },
    /// Fit a curve set to an (input, target) pair and save it
    Fit {
        input: PathBuf,
        target: PathBuf,
        /// Output curve file (NCV format)
        out_curves: PathBuf,
        /// Optimizer iterations
        #[arg(long, default_value_t = 500)]
        iters: usize,
        /// Control points per curve
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// Fusion probability threshold
        #[arg(long, default_value_t = 0.2)]
        tau: f64,
        /// Recorded for reproducibility; the default objective is
        /// deterministic
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        lut: Option<PathBuf>,
    },
    /// Apply a saved curve set to an image
    Apply {
        input: PathBuf,
        /// Curve file written by `fit`
        curves: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        tau: f64,
        #[arg(long)]
        lut: Option<PathBuf>,
    },
    /// Print metrics (psnr, ssim, de_ab, de_00) for an image pair
    Eval {
        a: PathBuf,
        b: PathBuf,
        /// Comma-separated subset of metrics to print
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
    },
    /// Fit every pair of a corpus (input/ and target/ subdirectories,
    /// matched by filename) and write per-pair curve files plus a CSV
    /// summary
    FitBatch {
        /// Corpus root containing input/ and target/
        corpus: PathBuf,
        /// Directory for curve files and summary.csv
        out_dir: PathBuf,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long, default_value_t = 0.2)]
        tau: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `wall` for measured seconds, `none` for a reproducible CSV
        #[arg(long, default_value = "wall")]
        timing: TimingMode,
        #[arg(long)]
        lut: Option<PathBuf>,
    },
    /// Expand a curve file into 18 text LUTs, one per (group, channel)
    BakeLut {
        curves: PathBuf,
        out_dir: PathBuf,
        /// Samples per LUT
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Decompose {
            input,
            out_dir,
            lut,
        } => cli::cmd_decompose(&input, &out_dir, lut.as_deref()),
        Command::Fit {
            input,
            target,
            out_curves,
            iters,
            points,
            tau,
            seed,
            lut,
        } => cli::cmd_fit(
            &input,
            &target,
            &out_curves,
            &FitOptions {
                iterations: iters,
                points,
                tau,
                seed,
                lut,
            },
        ),
        Command::Apply {
            input,
            curves,
            output,
            tau,
            lut,
        } => cli::cmd_apply(&input, &curves, &output, tau, lut.as_deref()),
        Command::Eval { a, b, metrics } => cli::cmd_eval(&a, &b, metrics.as_deref()),
        Command::FitBatch {
            corpus,
            out_dir,
            iters,
            points,
            tau,
            seed,
            timing,
            lut,
        } => cli::cmd_fit_batch(
            &corpus,
            &out_dir,
            &FitOptions {
                iterations: iters,
                points,
                tau,
                seed,
                lut,
            },
            timing,
        ),
        Command::BakeLut {
            curves,
            out_dir,
            resolution,
        } => cli::cmd_bake_lut(&curves, resolution, &out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
