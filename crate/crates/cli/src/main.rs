//! `rankcollide`: certify absence of multiple collisions and simulate
//! competing Brownian particle systems.
//!
//! Exit codes: 0 success (every requested criterion holds), 2 some
//! criterion fails or a spec is invalid under `validate`, 1 input error.

mod check;
mod manifest;
mod simulate;
mod sweep;
mod validate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rankcollide::SystemSpec;

#[derive(Debug, Parser)]
#[command(name = "rankcollide", version, about = "Collision certificates and simulation for rank-based Brownian particles")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct GlobalArgs {
    /// Output format for reports printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Master seed for all randomness.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for Monte Carlo paths (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate collision criteria for a system spec.
    Check(check::CheckArgs),
    /// Run a Monte Carlo simulation and write aggregate statistics.
    Simulate(simulate::SimulateArgs),
    /// Evaluate criteria (and optionally simulate) over a parameter grid.
    Sweep(sweep::SweepArgs),
    /// Report structural violations of a system spec.
    Validate(validate::ValidateArgs),
}

/// Successful outcome of a command.
pub enum Outcome {
    Ok,
    Fails,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => check::run(&cli.global, args),
        Command::Simulate(args) => simulate::run(&cli.global, args),
        Command::Sweep(args) => sweep::run(&cli.global, args),
        Command::Validate(args) => validate::run(&cli.global, args),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Fails) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn read_json(path: &Path) -> Result<(String, serde_json::Value)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok((text, value))
}

/// Loads a spec and rejects structurally invalid documents.
pub fn load_spec(path: &Path) -> Result<(SystemSpec, serde_json::Value)> {
    let (text, value) = read_json(path)?;
    let spec = SystemSpec::from_json(&text).with_context(|| format!("invalid spec {}", path.display()))?;
    let report = spec.validate();
    if !report.is_valid() {
        anyhow::bail!("invalid spec {}: {}", path.display(), report.violations.join("; "));
    }
    Ok((spec, value))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}
