//! `skglass`: command-line front end to the SK spin glass laboratory.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skglass_core::SkError;

use output::Format;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
    Failed(String),
    Io(String),
}

impl From<SkError> for CliError {
    fn from(e: SkError) -> Self {
        match e {
            SkError::InvalidArgument(_) => CliError::Usage(e.to_string()),
            SkError::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            SkError::Diagnostics(_) => CliError::Failed(e.to_string()),
        }
    }
}

/// Result of a command that ran to completion.
pub enum Outcome {
    Success,
    /// A scientific check failed or no crossing was found; already reported.
    CheckFailed,
}

#[derive(Parser, Debug)]
#[command(name = "skglass", version, about = "Exact enumeration and Monte Carlo for the SK spin glass")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Disorder-averaged free energy, entropy and energy over an (n, β) grid.
    Sweep(commands::SweepArgs),
    /// Exact-identity self-check suite.
    Validate(commands::ValidateArgs),
    /// Limit values, optionally with finite-n measurements.
    Predict(commands::PredictArgs),
    /// Locate where the extrapolated entropy crosses zero.
    ZeroCross(commands::ZeroCrossArgs),
    /// SK entropy against the random energy model.
    Rem(commands::RemArgs),
    /// Exact vs annealed ground states.
    Gs(commands::GsArgs),
    /// Monte Carlo energy (and free energy) against exact values.
    Mc(commands::McArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SizeArgs {
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<usize>,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
}

impl SizeArgs {
    pub fn sizes(&self) -> Option<Vec<usize>> {
        match (&self.n, &self.n_list) {
            (Some(n), _) => Some(vec![*n]),
            (None, Some(list)) => Some(list.clone()),
            (None, None) => None,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads, or `auto` for all cores.
    #[arg(long, env = "SKGLASS_WORKERS", default_value = "auto", value_parser = parse_workers)]
    pub workers: Workers,
}

#[derive(Debug, Clone, Copy)]
pub struct Workers(pub Option<usize>);

fn parse_workers(s: &str) -> Result<Workers, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Workers(None));
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive integer or `auto`, got `{s}`")),
        Ok(k) => Ok(Workers(Some(k))),
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Show entropies in bits in printed tables (files stay in nats).
    #[arg(long)]
    pub bits: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => commands::sweep(a),
        Command::Validate(a) => commands::validate(a),
        Command::Predict(a) => commands::predict(a),
        Command::ZeroCross(a) => commands::zero_cross(a),
        Command::Rem(a) => commands::rem(a),
        Command::Gs(a) => commands::gs(a),
        Command::Mc(a) => commands::mc(a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(CliError::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Failed(msg)) | Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
