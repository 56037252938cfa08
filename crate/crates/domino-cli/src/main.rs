//! Batch front end for the spin-chain sector tools. Emits plain CSV/JSON so
//! results can be plotted with anything; identical configurations produce
//! byte-identical output files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::CommonFlags;

#[derive(Parser)]
#[command(name = "domino", version, about = "Spin-chain sector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the dynamical sector of a seed configuration
    Sector {
        #[command(flatten)]
        flags: CommonFlags,
        /// Also write the sector Hamiltonian in coordinate text format
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Propagate the amplification initial state and record observables
    Evolve {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Evolve each boundary treatment and tabulate their differences per n
    Compare {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Semiclassical eigenvalue/eigenvector convergence table over a D-list
    Semiclassical {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Cross-check the sector pipeline against the full-space reference
    Verify {
        #[command(flatten)]
        flags: CommonFlags,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Sector { flags, matrix } => {
            let config = config::resolve(flags)?;
            commands::run_sector(&config, matrix.as_ref())
        }
        Command::Evolve { flags } => {
            let config = config::resolve(flags)?;
            commands::run_evolve(&config)
        }
        Command::Compare { flags } => {
            let config = config::resolve(flags)?;
            commands::run_compare(&config)
        }
        Command::Semiclassical { flags } => {
            let config = config::resolve(flags)?;
            commands::run_semiclassical(&config)
        }
        Command::Verify { flags } => {
            let config = config::resolve(flags)?;
            commands::run_verify(&config)
        }
    }
}

fn main() -> ExitCode {
    // flag parse failures are configuration errors: report usage, exit 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
