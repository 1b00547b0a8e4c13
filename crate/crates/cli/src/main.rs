mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::ConfigArgs;

/// Entanglement-breaking channel toolkit.
///
/// Channel documents are JSON files with `dim_in`, `dim_out`,
/// `normalization: "trace_one"` and the Choi state as `{"re": [[..]], "im": [[..]]}`.
/// Exit codes: 0 when a result was computed, 2 for invalid input, 3 for an
/// internal anomaly (including a solver that hit its iteration cap without
/// stalling).
#[derive(Debug, Parser)]
#[command(name = "ebtk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Indent the JSON output
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Clone, Args)]
struct ReportArgs {
    /// Skip the joint-channel ladder
    #[arg(long)]
    no_joint: bool,
    /// Skip the broadcasting search
    #[arg(long)]
    no_broadcast: bool,
    /// Add wall-clock timings to the report (reruns are then not
    /// byte-identical)
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full entanglement-breaking report for a channel document
    CheckEb {
        /// Channel document, or a directory of them with --batch
        input: PathBuf,
        /// Process every *.json file in the directory; one JSON line per file
        #[arg(long)]
        batch: bool,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for an n-joint channel
    Joint {
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for a post-processing channel with lhs = alpha after rhs
    Order {
        lhs: PathBuf,
        rhs: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for a broadcasting channel
    Broadcast {
        input: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Separable decomposition and measure-prepare form of a channel
    Holevo {
        input: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report for the coherent-state channel on a truncated Fock space
    Bargmann {
        /// Largest photon number kept
        #[arg(long, default_value_t = 3)]
        cutoff: usize,
        #[arg(long, default_value_t = 40)]
        radial_nodes: usize,
        #[arg(long, default_value_t = 64)]
        angular_nodes: usize,
        /// Coherent amplitude scale c in f(alpha) = c alpha
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        scale: f64,
        /// Use f(alpha) = c conj(alpha)
        #[arg(long)]
        conjugate: bool,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Seeded random channel document
    Random {
        kind: RandomKind,
        /// `dim_in dim_out` (`d` for unitary)
        #[arg(required = true, num_args = 1..=2)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Kraus rank for `channel`
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Number of measurement outcomes for `holevo`
        #[arg(long, default_value_t = 3)]
        effects: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RandomKind {
    /// Stinespring isometry with a Gaussian random matrix
    Channel,
    /// Measure-prepare channel; the document carries the form
    Holevo,
    /// Haar-random unitary conjugation
    Unitary,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
