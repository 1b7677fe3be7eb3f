use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use conserve_cli::commands::{self, CliError, Reference};

#[derive(Parser)]
#[command(name = "conserve", version, about = "Structure-preserving time integration experiments")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write per-step diagnostics as CSV.
    Run {
        config: PathBuf,
        /// Diagnostics CSV path; overrides `output` in the config. Defaults to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the final state as a binary snapshot.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Run two configurations of the same experiment and tabulate their drifts.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Halve the timestep repeatedly and estimate the observed temporal order.
    Convergence {
        config: PathBuf,
        #[arg(short, long)]
        levels: usize,
        /// Defaults to `exact` for the toy problem and `finest` otherwise.
        #[arg(long, value_enum)]
        reference: Option<ReferenceArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Exact,
    Finest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result: Result<(), CliError> = match cli.command {
        Command::Run {
            config,
            output,
            snapshot,
        } => commands::run(&config, output, snapshot),
        Command::Compare {
            config_a,
            config_b,
            output,
        } => commands::compare(&config_a, &config_b, output),
        Command::Convergence {
            config,
            levels,
            reference,
            output,
        } => {
            let reference = reference.map(|r| match r {
                ReferenceArg::Exact => Reference::Exact,
                ReferenceArg::Finest => Reference::Finest,
            });
            commands::convergence(&config, levels, reference, output)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
