//! `szegedy`: build walks on graphs, evolve them, and check the results.
//!
//! Exit status: 0 when the requested check passes, 1 when it fails, 2 for
//! configuration errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::UsageError;
use szegedy_core::evolution::DEFAULT_SEED;

#[derive(Parser)]
#[command(
    name = "szegedy",
    version,
    about = "Discrete and continuous Szegedy walks on finite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct WalkArgs {
    /// Builtin family (path, cycle, complete, star, torus3d) or an edge-list file.
    #[arg(long)]
    pub graph: String,
    /// Size parameter of a builtin family (vertices; leaves for star; side for torus3d).
    #[arg(long)]
    pub size: Option<usize>,
    /// grover, lattice3d, basis:<path> or hamiltonian:<path>.
    #[arg(long)]
    pub coin: String,
    /// Seed for random probe states.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum EvolveMode {
    Discrete,
    Continuous,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Sizes, degrees and subspace dimensions.
    Info {
        #[command(flatten)]
        walk: WalkArgs,
    },
    /// Evolve a state with U(eps/2)^2 and/or e^{itH}.
    Evolve {
        #[command(flatten)]
        walk: WalkArgs,
        /// arc:<i>, vertex:<u> or file:<path>.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Number of discrete steps N.
        #[arg(long, default_value_t = 0)]
        steps: usize,
        /// Mobility parameter; defaults to t/N.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_enum, default_value_t = EvolveMode::Both)]
        mode: EvolveMode,
        /// Fail when the largest per-arc difference reaches this value.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Measure |e^{itH} - U(t/2N)^{2N}| over a list of N.
    Converge {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Comma-separated, strictly increasing step counts.
        #[arg(long, default_value = "16,32,64,128,256,512,1024")]
        n_list: String,
        /// Use seeded probe states instead of the dense operator norm.
        #[arg(long)]
        probe: bool,
    },
    /// Compare the spectrum of H with the prediction from T and the birth spaces.
    Spectrum {
        #[command(flatten)]
        walk: WalkArgs,
    },
    /// Coisometry, intertwining and invariant-subspace checks.
    Verify {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    match cli.command {
        Command::Info { walk } => commands::info(&walk),
        Command::Evolve {
            walk,
            state,
            t,
            steps,
            eps,
            mode,
            tolerance,
        } => commands::evolve(&walk, &state, t, steps, eps, mode, tolerance),
        Command::Converge {
            walk,
            t,
            n_list,
            probe,
        } => commands::converge(&walk, t, &n_list, probe),
        Command::Spectrum { walk } => commands::spectrum(&walk),
        Command::Verify { walk, t, eps } => commands::verify(&walk, t, eps),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
