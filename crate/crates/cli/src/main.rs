use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod failure;
mod input;
mod output;
mod sweep;

use failure::Failure;

#[derive(Parser)]
#[command(name = "medsolve", version)]
#[command(about = "Persuasion, mediation and cheap talk in games where the sender cares only about the action")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Bp,
    Md,
    CtMax,
    CtMin,
    Nd,
}

impl ProtocolArg {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolArg::Bp => "bp",
            ProtocolArg::Md => "md",
            ProtocolArg::CtMax => "ct-max",
            ProtocolArg::CtMin => "ct-min",
            ProtocolArg::Nd => "nd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Linear program over joint state-action distributions (finite games).
    Outcome,
    /// Linear program over a grid of posteriors.
    Grid,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal value and plan under one protocol.
    Solve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        /// Comma-separated prior; a single number for binary games.
        #[arg(long)]
        prior: Option<String>,
        /// Posterior grid resolution.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Solve the outcome program in exact rational arithmetic.
        #[arg(long)]
        exact_lp: bool,
    },
    /// Value comparison, improvability and crossing tests at one prior.
    Diagnose {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        prior: String,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Protocol values over a grid of priors, as CSV.
    Sweep {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "bp,md,ct-max")]
        protocols: Vec<ProtocolArg>,
        /// Resolution of the prior grid; only interior priors are swept.
        #[arg(long)]
        prior_grid: usize,
        /// Posterior grid resolution used by the solvers.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to the number of logical cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Which protocols can implement a distribution of posteriors.
    Check {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Prior to check against; defaults to the plan's own average.
        #[arg(long)]
        prior: Option<String>,
    },
    /// Build a mediation plan that beats the best cheap-talk equilibrium.
    Improve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        prior: String,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run the built-in worked examples.
    Fixtures {
        #[arg(long)]
        name: Option<String>,
    },
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Solve { game, protocol, prior, grid, method, exact_lp } => {
            commands::solve(&game, protocol, prior.as_deref(), grid, method, exact_lp)
        }
        Command::Diagnose { game, prior, grid } => commands::diagnose(&game, &prior, grid),
        Command::Sweep { game, protocols, prior_grid, grid, out, jobs } => {
            sweep::run(&game, &protocols, prior_grid, grid, &out, jobs)
        }
        Command::Check { game, plan, prior } => commands::check(&game, &plan, prior.as_deref()),
        Command::Improve { game, prior, grid } => commands::improve(&game, &prior, grid),
        Command::Fixtures { name } => commands::fixtures(name.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("medsolve: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
