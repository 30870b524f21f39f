use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use xylab::cli;

/// Disordered quantum XY chain simulator: exact free-fermion transport and
/// entanglement dynamics over disorder ensembles, with a dense many-body
/// verification suite.
#[derive(Parser)]
#[command(name = "xylab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON, strict schema).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/JSON results and the run manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: XYLAB_THREADS or all cores). Results are
    /// identical at any thread count.
    #[arg(long)]
    threads: Option<usize>,
    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Particle-number transport of the disordered isotropic chain.
    Transport(RunArgs),
    /// Entanglement-entropy dynamics over a size sweep, with verdicts.
    Entanglement(RunArgs),
    /// Eigenfunction-correlator decay profile and fits.
    Eigencorrelator(RunArgs),
    /// Dense-oracle verification suite (exit 0 iff all checks pass).
    Verify {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 20240581)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Transport(a) => {
            cli::init_threads(a.threads);
            cli::cmd_transport(&a.config, &a.out, a.seed)
        }
        Command::Entanglement(a) => {
            cli::init_threads(a.threads);
            cli::cmd_entanglement(&a.config, &a.out, a.seed)
        }
        Command::Eigencorrelator(a) => {
            cli::init_threads(a.threads);
            cli::cmd_eigencorrelator(&a.config, &a.out, a.seed)
        }
        Command::Verify { out, threads, seed } => {
            cli::init_threads(*threads);
            cli::cmd_verify(out, *seed)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
