use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use divmig::harness::{self, report, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(
    name = "divmig",
    version,
    about = "Island-model EA for the TSP with diversity-gated migration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Subcommand)]
enum Command {
    /// Print a summary of a TSPLIB file.
    Inspect { file: PathBuf },
    /// One run with the first mode and interval of a config; writes trace.csv.
    Run { config: PathBuf },
    /// Every (mode, interval) cell of a config, repeated; writes raw.csv,
    /// aggregate.csv and report.md.
    Experiment { config: PathBuf },
    /// Recompute aggregates from raw.csv, or print the acceptance curve.
    Stats {
        /// Raw results file (omit with --curve).
        raw: Option<PathBuf>,
        /// Print `d p` pairs of the acceptance probability instead.
        #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"], allow_negative_numbers = true)]
        curve: Option<Vec<f64>>,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Optimum used for DF when the instance is not in the built-in table.
        #[arg(long)]
        optimum: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Inspect { file } => print!("{}", harness::inspect(&file)?),
        Command::Run { config } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let (_, summary) = harness::run_single(&cfg)?;
            print!("{summary}");
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let outcome = harness::experiment(&cfg)?;
            print!("{}", harness::render_markdown(&outcome.reports));
            eprintln!("results written to {}", cfg.out_dir.display());
        }
        Command::Stats {
            raw,
            curve,
            points,
            optimum,
            format,
        } => match (curve, raw) {
            (Some(ab), None) => print!("{}", harness::probability_curve(ab[0], ab[1], points)?),
            (None, Some(raw)) => {
                let reports = harness::stats_from_raw(&raw, optimum)?;
                match format {
                    Format::Markdown => print!("{}", harness::render_markdown(&reports)),
                    Format::Csv => report::write_aggregate_csv(std::io::stdout().lock(), &reports)?,
                }
            }
            _ => {
                return Err(HarnessError::Config(
                    "stats needs either a raw CSV file or --curve ALPHA BETA".into(),
                ))
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("divmig: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
