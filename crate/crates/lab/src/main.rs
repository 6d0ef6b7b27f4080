use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nambu_lab::error::EXIT_CONFIG;
use nambu_lab::{Command, Options};

/// Runs a verification scenario and writes `report.json` plus CSV series.
#[derive(Debug, Parser)]
#[command(name = "nambu-lab", version)]
struct Cli {
    command: Command,
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the command's primary tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    if let Err(e) = nambu_lab::init_threads() {
        eprintln!("nambu-lab: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let opts = Options { command: cli.command, config: cli.config, out: cli.out.clone(), seed: cli.seed, tol: cli.tol };
    let outcome = nambu_lab::run(&opts);
    let b = &outcome.body;
    for c in &b.checks {
        let status = if c.passed { "ok  " } else { "FAIL" };
        eprintln!("{status} {}: {:e} (tol {:e})", c.name, c.value, c.tol);
    }
    for w in &b.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(e) = &b.error {
        eprintln!("nambu-lab: {e}");
    }
    eprintln!("report: {}", cli.out.join("report.json").display());
    ExitCode::from(outcome.exit_code as u8)
}
