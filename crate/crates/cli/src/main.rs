//! `cpair`: run scenario files and work with symbol and matrix containers.

mod commands;
mod corpus;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cpair", version, about = "Verify compatible pairs of *-algebras at finite truncation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario and write a report.
    Verify {
        /// Scenario file, or the name of a corpus scenario.
        scenario: String,
        /// Phase-space grid size N.
        #[arg(long)]
        grid: Option<usize>,
        /// Phase-space box half-width L.
        #[arg(long = "box")]
        box_: Option<f64>,
        /// Hermite truncation M.
        #[arg(long)]
        hermite: Option<usize>,
        /// Tolerance for every residual check.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Report file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Twisted product of two symbols.
    Star {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Matrix of the Weyl quantization of a symbol.
    Op {
        symbol: PathBuf,
        /// Hermite truncation M.
        #[arg(long, conflicts_with = "grid_basis")]
        hermite: Option<usize>,
        /// Use the symbol's position grid as basis instead.
        #[arg(long)]
        grid_basis: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Matrices of the induced representation of a scenario's generators.
    Rep {
        scenario: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Catalogue of shipped scenarios and action kinds.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Verify { scenario, grid, box_, hermite, tol, seed, format, output, timing } => {
            let o = commands::Overrides { grid, box_, hermite, tol, seed };
            commands::verify(&scenario, &o, format, output.as_deref(), timing)
        }
        Command::Star { a, b, output } => commands::star(&a, &b, &output),
        Command::Op { symbol, hermite, grid_basis, output } => commands::op(&symbol, hermite, grid_basis, &output),
        Command::Rep { scenario, output } => commands::rep(&scenario, &output),
        Command::List => commands::list(),
    };
    match r {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
