use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use superlab_cli::{execute, validate_config, Command, RunOptions};

#[derive(Parser)]
#[command(name = "superlab", version, about = "Thresholds, pulses and spectra of the driven Dicke model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file (`key = value` per line)
    config: PathBuf,
    /// Also write an SVG plot
    #[arg(long)]
    plot: bool,
    /// Worker threads for sweeps (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory
    #[arg(long, env = "SUPERLAB_OUT", default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Critical coupling versus a swept parameter
    Threshold(RunArgs),
    /// Mean-field ramp run
    Pulse(RunArgs),
    /// Weak-probe transmission below threshold
    Spectrum(RunArgs),
    /// Echo the resolved configuration or list every problem
    Validate {
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Threshold(a) => (Command::Threshold, a),
        Cmd::Pulse(a) => (Command::Pulse, a),
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::Validate { config } => {
            return match validate_config(&config) {
                Ok(echo) => {
                    print!("{echo}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
    };
    let opts = RunOptions { out_dir: args.out, plot: args.plot, jobs: args.jobs };
    match execute(command, &args.config, &opts) {
        Ok(outcome) => {
            for p in &outcome.outputs {
                println!("wrote {}", p.display());
            }
            for (k, v) in &outcome.summary {
                println!("{k} = {v}");
            }
            if outcome.failed_points > 0 {
                eprintln!(
                    "warning: {} of {} points failed numerically (exists=false)",
                    outcome.failed_points, outcome.total_points
                );
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
