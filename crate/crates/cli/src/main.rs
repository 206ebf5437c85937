//! `gamma237`: reproducible experiments with left-orders of the lifted
//! (2,3,7) triangle group.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use gamma237::harness::{ConfigError, SpecError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gamma237", version, about = "Left-orders of the lifted (2,3,7) triangle group")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Experiment config (TOML); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ball radius for F (and the realization stage).
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Maximum conjugator word length.
    #[arg(long, global = true)]
    budget_length: Option<usize>,
    /// Include exact tower coordinates of the generator matrices.
    #[arg(long, global = true)]
    exact_matrices: bool,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Guided,
    Bfs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify the defining relations and report translation numbers.
    GenCheck {
        /// Perturb one generator entry (test fixture for the failure path).
        #[arg(long, hide = true)]
        perturb: bool,
    },
    /// Write the cone table of one order on a ball.
    Table {
        /// near:X | dir:U,V@SHEET | fix:WORD:attracting@SHEET | move:WORD|SPEC
        #[arg(long, default_value = "dir:3/7,5/11@0")]
        basepoint: String,
        /// Comma-separated sides, e.g. left,right.
        #[arg(long, value_delimiter = ',', default_value = "left")]
        tiebreak: Vec<String>,
        #[arg(long)]
        reversed: bool,
        /// Position inside the gap of a blow-up along the basepoint orbit.
        #[arg(long)]
        gap: Option<String>,
    },
    /// Approximate the first order by conjugates of each of the others.
    Approximate {
        #[arg(long, value_enum, default_value = "guided")]
        strategy: StrategyArg,
        /// Also approximate by the first order conjugated by this word.
        #[arg(long)]
        plant: Option<String>,
    },
    /// Pairwise reachability matrix over the configured orders.
    Scan,
    /// Blow up the orbit of the first basepoint and check the semi-conjugacy.
    Blowup,
    /// Build a finite-stage dynamical realization of the first order.
    Realize,
    /// Re-verify every witness in an approximate or scan report.
    Verify { report: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenCheck { perturb } => commands::gen_check(&cli.global, *perturb),
        Command::Table { basepoint, tiebreak, reversed, gap } => {
            commands::table(&cli.global, basepoint, tiebreak, *reversed, gap.clone())
        }
        Command::Approximate { strategy, plant } => commands::approximate(&cli.global, *strategy, plant.as_deref()),
        Command::Scan => commands::scan(&cli.global),
        Command::Blowup => commands::blowup(&cli.global),
        Command::Realize => commands::realize(&cli.global),
        Command::Verify { report } => commands::verify(report),
    };
    match result {
        Ok(summary) => {
            // A closed pipe (e.g. `| head`) is not worth a panic.
            let _ = writeln!(std::io::stdout(), "{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
