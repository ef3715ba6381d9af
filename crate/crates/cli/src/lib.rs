//! Command-line front end: instance and table files, solving, preprocessing,
//! gadget generation, plots and piece-count benchmarks.

pub mod bench;
pub mod commands;
pub mod files;
pub mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::run;
pub use files::{Invalid, InstanceFile, TableFile};

#[derive(Debug, Parser)]
#[command(name = "gpp", version, about = "Generalized path problems on DAGs with parametric edge weights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal path for one start value.
    Solve(SolveArgs),
    /// Builds the start-value lookup table of a scalar instance.
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Looks up the optimal path for a start value in a table.
    Query {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
    },
    /// Writes one of the reduction instances.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Samples every path cost and the optimal envelope as CSV or SVG.
    Plot(PlotArgs),
    /// Piece-count benchmarks.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Start value; comma-separated for vector instances. Overrides the file.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Total duration budget; requires --durations.
    #[arg(long, requires = "durations")]
    pub budget: Option<usize>,
    /// JSON array with one positive integer duration per edge id.
    #[arg(long, requires = "budget")]
    pub durations: Option<PathBuf>,
    /// Brute force over all paths instead of the relaxation solver.
    #[arg(long, conflicts_with = "budget")]
    pub oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum GadgetCommand {
    SetPartition {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        elements: Vec<i64>,
        #[arg(long, default_value = "0")]
        delta: String,
        #[arg(long, default_value = "0")]
        epsilon: String,
        /// Use x^2 instead of |x| on the last edge.
        #[arg(long)]
        square: bool,
        #[arg(long)]
        output: PathBuf,
    },
    ProductPartition {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        elements: Vec<i64>,
        #[arg(long)]
        output: PathBuf,
    },
    Lowerbound {
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, conflicts_with = "table", required_unless_present = "table")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Output file; `.svg` writes a drawing, anything else CSV.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    pub x_range: String,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    Pieces {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Lowerbound,
    Random,
}

/// Process exit status for an error: 2 validation, 3 path cap, 4 I/O.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<gpp_core::Error>() {
            return if matches!(e, gpp_core::Error::TooManyPaths { .. }) { 3 } else { 2 };
        }
        if cause.downcast_ref::<Invalid>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<serde_json::Error>() {
            return if e.is_io() { 4 } else { 2 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
    }
    2
}

/// Stable name for the error, printed before the message.
pub fn error_name(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<gpp_core::Error>() {
            return e.name();
        }
        if let Some(e) = cause.downcast_ref::<Invalid>() {
            return e.name;
        }
        if let Some(e) = cause.downcast_ref::<serde_json::Error>() {
            return if e.is_io() { "IoError" } else { "ParseError" };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "IoError";
        }
    }
    "Error"
}
