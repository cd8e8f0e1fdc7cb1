use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use circumnav_cli::commands::{cmd_run, cmd_sweep, cmd_validate};

/// Multi-agent circumnavigation of a moving circular target:
/// deterministic scenario runs, parameter sweeps, and config validation.
/// Set RUST_LOG=info for progress output.
#[derive(Parser)]
#[command(name = "circumnav", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSV, summary, claim report, and SVG plots
    Run {
        /// Scenario config file
        config: PathBuf,
        /// Output directory for the artifact set
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run one scenario per value of a sweepable scalar
    Sweep {
        /// Scenario config file
        config: PathBuf,
        /// Key to sweep: delta, u_max, dt, noise_amplitude, eta,
        /// drift_speed, or r_rate
        #[arg(long)]
        key: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Output directory for sweep.csv
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Parse and validate a config, printing its canonical form
    Validate {
        /// Scenario config file
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output } => cmd_run(&config, &output).map(|artifacts| {
            for path in artifacts.all_paths() {
                println!("{}", path.display());
            }
        }),
        Command::Sweep { config, key, values, output } => {
            cmd_sweep(&config, &key, &values, &output).map(|path| {
                println!("{}", path.display());
            })
        }
        Command::Validate { config } => cmd_validate(&config).map(|canonical| {
            print!("{canonical}");
            println!("# ok");
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
