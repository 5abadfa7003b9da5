//! `ccflex`: coded-caching placement, delivery and rate simulation.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ccflex_core::io::parse_placement;
use ccflex_core::placement::{achievable_packet_counts, enumerate_blocks};

mod config;
mod scenario;

use config::SimConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or command line; exit 2.
    Config(String),
    /// Input data fails validation; exit 3.
    Validation(String),
    /// A built schedule does not decode; exit 4.
    Decode(String),
    /// Filesystem trouble; exit 1.
    Io(String),
    /// Simulation failed after a valid setup; exit 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Decode(_) => 4,
            CliError::Io(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Validation(msg) => write!(f, "validation: {msg}"),
            CliError::Decode(msg) => write!(f, "decode: {msg}"),
            CliError::Io(msg) => write!(f, "io: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ccflex",
    version,
    about = "Coded caching with selectable subpacketization: placement, delivery schedules, and ZF rate simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a placement matrix file against the row/column sum rules.
    Validate {
        /// Placement text file: `P K t` header, then P rows of 0/1.
        matrix: PathBuf,
    },
    /// List the placement blocks and achievable packet counts for (K, t).
    Blocks {
        #[arg(long = "K")]
        users: usize,
        #[arg(long = "t")]
        cache_ratio: usize,
    },
    /// Build delivery schedules and export placement + schedule files.
    Schedule {
        config: PathBuf,
        /// Skip validation of file-sourced placement matrices.
        #[arg(long)]
        no_validate: bool,
    },
    /// Write the per-user efficiency index table.
    Efficiency {
        config: PathBuf,
        #[arg(long)]
        no_validate: bool,
    },
    /// Full pipeline: schedules, efficiency, Monte-Carlo rate sweep.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        no_validate: bool,
    },
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("CCFLEX_SEED") {
        Err(_) => Ok(None),
        Ok(raw) => raw.parse().map(Some).map_err(|_| {
            CliError::Config(format!("CCFLEX_SEED = `{raw}` is not a valid seed"))
        }),
    }
}

fn load_config(path: &PathBuf) -> Result<SimConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    SimConfig::parse(&text, env_seed()?)
}

fn run_validate(path: &PathBuf) -> Result<(), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let matrix =
        parse_placement(&text, true).map_err(|e| CliError::Validation(e.to_string()))?;
    println!(
        "valid placement: P = {}, K = {}, t = {}",
        matrix.packets(),
        matrix.users(),
        matrix.replication()
    );
    Ok(())
}

fn run_blocks(users: usize, cache_ratio: usize) -> Result<(), CliError> {
    if users == 0 || cache_ratio == 0 || cache_ratio > users {
        return Err(CliError::Config(format!(
            "need 1 <= t <= K, got K = {users}, t = {cache_ratio}"
        )));
    }
    let blocks = enumerate_blocks(users, cache_ratio);
    for (i, block) in blocks.iter().enumerate() {
        println!("block {} (height {}):", i + 1, block.height());
        for row in block.as_matrix().rows() {
            let line: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
            println!("  {line}");
        }
    }
    let achievable: Vec<usize> = achievable_packet_counts(users, cache_ratio)
        .into_iter()
        .collect();
    println!("achievable packet counts: {achievable:?}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { matrix } => run_validate(&matrix),
        Command::Blocks { users, cache_ratio } => run_blocks(users, cache_ratio),
        Command::Schedule { config, no_validate } => {
            scenario::run_schedule(&load_config(&config)?, !no_validate)
        }
        Command::Efficiency { config, no_validate } => {
            scenario::run_efficiency(&load_config(&config)?, !no_validate)
        }
        Command::Simulate { config, no_validate } => {
            scenario::run_simulate(&load_config(&config)?, !no_validate)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
