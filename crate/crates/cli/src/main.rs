//! `hamlow` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a certificate or
//! filter check contradicted the oracle, 3 the instance exceeds the oracle cap.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

/// Raised after a report is written when a check against the oracle failed.
#[derive(Debug)]
pub struct ValidationFailed(pub String);

impl std::fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "validation failed: {}", self.0)
    }
}

impl std::error::Error for ValidationFailed {}

#[derive(Debug, Parser)]
#[command(name = "hamlow", version, about = "Low-energy spectral certificates and filtering for k-local Hamiltonians")]
struct Cli {
    /// JSON config; explicit flags take precedence over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random k-local Pauli instance.
    Gen(commands::GenFlags),
    /// Certify lower bounds on N(E_ref + mu M).
    Certify(commands::CertifyFlags),
    /// Variational depth-d upper bound on the energy.
    OptimizeDepth(commands::OptimizeFlags),
    /// Filter the maximally entangled state and estimate the energy.
    Simulate(commands::SimulateFlags),
    /// Runtime exponent table.
    Table(commands::TableFlags),
    /// Certify (and optionally simulate) many random instances; JSON lines.
    Sweep(commands::SweepFlags),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = cli.config.as_deref().map(config::load_file).transpose()?;
    let file = file.as_ref();
    match &cli.command {
        Command::Gen(f) => commands::gen(file, f),
        Command::Certify(f) => commands::certify(file, f),
        Command::OptimizeDepth(f) => commands::optimize(file, f),
        Command::Simulate(f) => commands::simulate(file, f),
        Command::Table(f) => commands::table(file, f),
        Command::Sweep(f) => commands::sweep(file, f),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ValidationFailed>().is_some() {
            return 2;
        }
        if let Some(hamlow::Error::ScaleExceeded { .. }) = cause.downcast_ref::<hamlow::Error>() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let validation = anyhow::Error::new(ValidationFailed("x".into())).context("certify");
        assert_eq!(exit_code(&validation), 2);
        let scale = anyhow::Error::new(hamlow::Error::ScaleExceeded { n: 20, cap: 14 });
        assert_eq!(exit_code(&scale), 3);
        assert_eq!(exit_code(&anyhow::anyhow!("bad flag")), 1);
    }
}
