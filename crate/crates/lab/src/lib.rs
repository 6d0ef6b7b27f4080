//! Scenario runner for the `nambu-core` checks: JSON scenarios in,
//! `report.json` and CSV series out.

pub mod build;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;

use crate::error::{ConfigError, LabError, EXIT_CHECK_FAILED, EXIT_NUMERIC, EXIT_OK};
use crate::report::ReportBody;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "NAMBU_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Simulate,
    CheckDynamics,
    CheckLiouville,
    CheckSymmetry,
    Invariant,
    Momentum,
    Action,
    Convergence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::CheckDynamics => "check-dynamics",
            Command::CheckLiouville => "check-liouville",
            Command::CheckSymmetry => "check-symmetry",
            Command::Invariant => "invariant",
            Command::Momentum => "momentum",
            Command::Action => "action",
            Command::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub command: Command,
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub body: ReportBody,
}

/// Loads, runs and reports. The report is written whenever the output
/// directory can be created, including for config errors.
pub fn run(opts: &Options) -> Outcome {
    let start = Instant::now();
    let bytes = std::fs::read(&opts.config);
    let mut body = ReportBody::new(opts.command.name(), bytes.as_deref().unwrap_or_default());
    let result = match bytes {
        Ok(b) => execute(opts, &b, &mut body),
        Err(e) => Err(ConfigError::new("", format!("cannot read {}: {e}", opts.config.display())).into()),
    };
    let mut exit_code = match result {
        Ok(()) if body.all_passed() => EXIT_OK,
        Ok(()) => EXIT_CHECK_FAILED,
        Err(e) => {
            body.error = Some(e.to_string());
            e.exit_code()
        }
    };
    body.passed = exit_code == EXIT_OK;
    let written = std::fs::create_dir_all(&opts.out).and_then(|_| body.write(&opts.out, start.elapsed().as_secs_f64()));
    if let Err(e) = written {
        body.error.get_or_insert_with(|| format!("cannot write report: {e}"));
        if exit_code == EXIT_OK || exit_code == EXIT_CHECK_FAILED {
            exit_code = EXIT_NUMERIC;
        }
    }
    Outcome { exit_code, body }
}

fn execute(opts: &Options, bytes: &[u8], body: &mut ReportBody) -> Result<(), LabError> {
    if let Some(t) = opts.tol {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(ConfigError::new("--tol", "must be a finite non-negative number").into());
        }
    }
    let text = std::str::from_utf8(bytes).map_err(|e| ConfigError::new("", format!("config is not UTF-8: {e}")))?;
    let cfg = config::parse(text)?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    body.scenario = Some(cfg.name.clone());
    body.seed = Some(seed);
    body.config = Some(cfg.clone());
    let sys = build::system(&cfg.system)?;
    let params = build::integrator(&cfg.integrator)?;
    body.result("system", serde_json::json!({ "label": sys.label(), "n": sys.n(), "kind": sys.kind() }));
    let base = opts.config.parent().map(Path::to_path_buf).unwrap_or_default();
    std::fs::create_dir_all(&opts.out)?;
    let mut run = commands::Run { cfg: &cfg, sys, params, seed, tol: opts.tol, base: &base, out: &opts.out, report: body };
    commands::run(opts.command, &mut run)
}

/// Builds the global rayon pool from [`THREADS_ENV`] when set.
pub fn init_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError::new(THREADS_ENV, format!("expected a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| ConfigError::new(THREADS_ENV, e.to_string()))
}
