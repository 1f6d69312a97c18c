//! Command-line front end: certify maps, extract Kraus operators, tabulate
//! truncation residuals and build trace-out channels from dilations.
//!
//! Exit status: 0 on pass, 1 on a failed verdict (the report is still
//! printed), 2 on any input error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod mapfile;

pub use mapfile::MapFile;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error in {file} at `{path}`: {message}")]
    Parse {
        file: String,
        path: String,
        message: String,
    },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] choicert_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Cp,
    Subchannel,
    Channel,
}

#[derive(Debug, Parser)]
#[command(
    name = "choicert",
    version,
    about = "Certify completely positive maps on truncated operator spaces"
)]
pub struct Cli {
    /// Verdict tolerance (PSD, subchannel excess, trace deviation).
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Relative eigenvalue cutoff for Kraus extraction.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rank_tol: f64,
    /// Ascending truncation levels, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for `random-kraus` builtins that do not set their own.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the Choi ladder on a map document.
    Certify {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Cp)]
        mode: ModeArg,
    },
    /// Decompose a positive Choi matrix into Kraus operators.
    ExtractKraus {
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Tabulate `‖P_n g P_n − g‖_p`, or `‖μ(P_n g P_n) − μ(g)‖_p` for a map.
    Convergence {
        /// A bare matrix `{rows, cols, data}` or a map document.
        input: PathBuf,
        /// Schatten exponent: a real `p ≥ 1` or `inf`.
        #[arg(long, default_value = "1")]
        p: String,
        /// Probe operator (bare matrix) for map inputs; defaults to `diag(2^-k)`.
        #[arg(long)]
        probe: Option<PathBuf>,
    },
    /// Turn a dilation into a Kraus document.
    BuildTraceout {
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments and runs one command without touching the process streams.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
