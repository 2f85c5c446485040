//! `hkquot`: batch analyses of torus GIT and hyperkähler quotients.

mod commands;
mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hkquot::Error;

#[derive(Parser, Debug)]
#[command(name = "hkquot", version, about = "GIT and hyperkähler quotients of linear torus actions")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every command.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Arithmetic used for point inputs: exact rationals or floating point.
    #[arg(long, value_enum, default_value_t = Mode::Exact, global = true)]
    pub mode: Mode,
    /// Numerical tolerance (moment-map residual, support threshold in numeric mode).
    #[arg(long, default_value_t = 1e-10, global = true)]
    pub tol: f64,
    /// Enumeration bound on the number of coordinates.
    #[arg(long, default_value_t = hkquot::git::DEFAULT_ENUMERATION_BOUND, global = true)]
    pub bound: usize,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Numeric,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Unstable loci, compactness, smoothness and strata of a weight system.
    Analyze {
        /// Weight-system JSON file, or inline JSON.
        weights: String,
        /// Try to certify every hyperkähler stratum candidate with a witness.
        #[arg(long)]
        certify: bool,
    },
    /// Stability verdict of a point, with a certificate when not stable.
    Classify {
        weights: String,
        /// Point JSON file or inline JSON: {"coords": ...} or {"x": ..., "z": ...}.
        #[arg(long)]
        point: String,
    },
    /// Kempf–Ness minimization.
    Kn {
        weights: String,
        #[arg(long)]
        point: String,
        /// Solve on the cotangent bundle (requires a holomorphic-moment zero).
        #[arg(long)]
        hyperkahler: bool,
        /// Write the moment pairing along the solution ray as CSV to this path.
        #[arg(long)]
        trace: Option<String>,
    },
    /// Reduced metric and Kähler forms at a point of the hyperkähler level set.
    Metric {
        weights: String,
        #[arg(long)]
        point: String,
        /// JSON list of `[u, v]` pairs of real tangent vectors of length 4n.
        #[arg(long)]
        pairs: Option<String>,
    },
    /// Verification suite for the Hirzebruch surface example.
    Hirzebruch {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        c0: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        c1: String,
    },
}

/// Failure categories with their exit codes.
#[derive(Debug)]
pub enum Failure {
    Precondition(String),
    Assertion(String),
    Undecided(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Precondition(_) => 2,
            Failure::Assertion(_) => 3,
            Failure::Undecided(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Precondition(_) => "precondition",
            Failure::Assertion(_) => "assertion",
            Failure::Undecided(_) => "undecided",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Precondition(m) | Failure::Assertion(m) | Failure::Undecided(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Undecided { .. } => Failure::Undecided(e.to_string()),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.run.threads > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.run.threads).build_global();
    }
    let (doc, failure) = match commands::run(&cli) {
        Ok(out) => (out.document, out.failure),
        Err(f) => (render::error_document(f.kind(), f.message()), Some(f)),
    };
    print!("{}", render::render(&doc, cli.run.format));
    match failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("hkquot: {}: {}", f.kind(), f.message());
            ExitCode::from(f.code())
        }
    }
}
