//! `germnorm`: evaluate step norms and weighted norms of truncated germs,
//! build null sequences from ε, and verify the block inclusion.
//!
//! Exit codes: 0 success, 2 malformed input, 3 shape violation,
//! 4 a mathematical check failed.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::CliError;

#[derive(Parser, Debug)]
#[command(name = "germnorm", version)]
#[command(
    about = "Norms, null-sequence seminorms and block certificates for truncated analytic germs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Germ,
    Scalar,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ElementKind {
    Random,
    Zero,
    Boundary,
}

/// Where an element comes from: a germ file or a closed-form family.
#[derive(Args, Debug)]
pub struct Source {
    /// Germ JSON file.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    input: Option<PathBuf>,

    /// cauchy, exponential, polynomial, geometric_scalar or factorial_scalar.
    #[arg(long)]
    family: Option<String>,

    /// Family parameters, e.g. `a=2`, `r=3`, `0=1,2=1`.
    #[arg(long, default_value = "")]
    params: String,

    /// Dimension d. Defaults to 1 for families; checked against a file.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    dim: Option<u32>,

    /// Truncation order. Defaults to 20 for families; truncates a file.
    #[arg(long = "N")]
    order_cap: Option<u32>,

    /// Grid points per axis on [0,1]^d for germ families.
    #[arg(long, default_value_t = 3)]
    grid_points: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Step norm ‖x‖_k.
    Norm {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Window for the heuristic growth flags (default min(10, N)).
        #[arg(long)]
        window: Option<u32>,
    },
    /// Weighted norm |x|_δ with δ built from ε.
    Seminorm {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 0)]
        margin: u32,
    },
    /// Build δ from ε and check δ_n^{-n} ≤ ε_k k^n.
    Delta {
        #[arg(long)]
        eps: String,
        #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
        order_cap: u32,
        #[arg(long, default_value_t = 0)]
        margin: u32,
    },
    /// Check the block inclusion on seeded random elements of the unit ball.
    Verify {
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        dim: u32,
        #[arg(long = "N", default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        order_cap: u32,
        #[arg(long, value_enum, default_value_t = Mode::Germ)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = ElementKind::Random)]
        element: ElementKind,
        /// Grid points per axis in germ mode.
        #[arg(long, default_value_t = 2)]
        grid_points: usize,
        #[arg(long, default_value_t = 0)]
        margin: u32,
    },
    /// Split an element into blocks ξ_k and report their step norms.
    Decompose {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 0)]
        margin: u32,
    },
    /// Per-order growth rates s_n and heuristic step membership.
    Growth {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10)]
        window: u32,
    },
    /// Write a family as a germ JSON file.
    Generate {
        #[command(flatten)]
        source: Source,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = output::Sink::new(cli.output, cli.format);
    match cli.command {
        Command::Norm { source, k, window } => commands::norm(&out, &source, k, window),
        Command::Seminorm {
            source,
            eps,
            margin,
        } => commands::seminorm(&out, &source, &eps, margin),
        Command::Delta {
            eps,
            order_cap,
            margin,
        } => commands::delta(&out, &eps, order_cap, margin),
        Command::Verify {
            eps,
            samples,
            dim,
            order_cap,
            mode,
            element,
            grid_points,
            margin,
        } => commands::verify(
            &out,
            &commands::VerifyConfig {
                eps,
                samples,
                dim: dim as usize,
                order_cap,
                mode,
                element,
                grid_points,
                margin,
                seed: cli.seed,
            },
        ),
        Command::Decompose {
            source,
            eps,
            margin,
        } => commands::decompose(&out, &source, &eps, margin),
        Command::Growth { source, window } => commands::growth(&out, &source, window),
        Command::Generate { source } => commands::generate(&out, &source),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("germnorm: {}", e.error);
            ExitCode::from(e.code)
        }
    }
}
