use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nmsplit::io::{self, IngestOptions, RunConfig};
use nmsplit::spectrum::find_peaks;
use nmsplit::Error;

/// Cavity transmission spectra with multi-normal-mode splitting.
#[derive(Debug, Parser)]
#[command(name = "nmsplit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep one configuration; writes spectrum.csv, peaks.json and plot.svg.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a list of a0La values or temperatures; writes ladder.json and crossing.svg.
    Ladder {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit model parameters to a measured scan; writes fit.json.
    Fit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect peaks in a two-column CSV and print them as JSON.
    Peaks {
        #[arg(long = "in")]
        input: PathBuf,
        /// Minimum peak height in the units of the data; must lie in (0, 1).
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
}

/// `println!` that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! emit {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

/// A failure and the exit code it maps to.
struct Failure(u8, Error);

fn load(path: &Path) -> Result<RunConfig, Failure> {
    RunConfig::load(path).map_err(|e| Failure(EXIT_USAGE, e))
}

fn classify(e: Error) -> Failure {
    match e {
        Error::Config(_) => Failure(EXIT_USAGE, e),
        _ => Failure(EXIT_RUNTIME, e),
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate { config, out } => {
            let report = io::run_simulate(&load(&config)?, &out).map_err(classify)?;
            emit!(
                "{} peaks, split modes {:?}, g√N {}",
                report.peaks.len(),
                report.split_modes,
                fmt_mhz(report.g_sqrt_n_hz)
            );
        }
        Command::Ladder { config, out } => {
            let report = io::run_ladder(&load(&config)?, &out).map_err(classify)?;
            for p in &report.points {
                emit!(
                    "point {:2}: a0La {:8.2}  peaks {:2}  split modes {:?}  g√N {}",
                    p.index,
                    p.a0_la,
                    p.peak_count,
                    p.split_modes,
                    fmt_mhz(p.g_sqrt_n_hz)
                );
            }
        }
        Command::Fit { config, data, out } => {
            let report = io::run_fit(&load(&config)?, &data, &out).map_err(classify)?;
            for f in &report.free {
                emit!("{} = {}", f.param.name(), report.param(f.param));
            }
            emit!("residual = {}", report.result.residual);
        }
        Command::Peaks { input, threshold } => {
            let spectrum = io::ingest_spectrum(&input, &IngestOptions { normalize_to: None })
                .map_err(|e| Failure(EXIT_RUNTIME, e))?;
            let peaks = find_peaks(&spectrum, threshold).map_err(|e| Failure(EXIT_USAGE, e))?;
            let json = serde_json::to_string_pretty(&peaks)
                .map_err(|e| Failure(EXIT_RUNTIME, e.into()))?;
            emit!("{json}");
        }
    }
    Ok(())
}

fn fmt_mhz(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |hz| format!("{:.1} MHz", hz / 1e6))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, e)) => {
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
