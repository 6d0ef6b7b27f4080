//! One module per CLI command. Each command reads its block from the
//! scenario, records checks and results on the report and writes CSV series
//! into the output directory.

mod action;
mod checks;
mod convergence;
mod invariant;
mod momentum;
mod simulate;

use std::path::Path;

use nambu_core::{ExtendedPoint, IntegratorParams};

use crate::build::System;
use crate::config::{RegionConfig, ScenarioConfig};
use crate::error::{ConfigError, Result};
use crate::output::CsvTable;
use crate::report::ReportBody;
use crate::{build, Command};

/// Everything a command needs.
pub struct Run<'a> {
    pub cfg: &'a ScenarioConfig,
    pub sys: System,
    pub params: IntegratorParams,
    pub seed: u64,
    /// `--tol`: replaces the command's primary tolerance.
    pub tol: Option<f64>,
    /// Directory of the config file; CSV references resolve against it.
    pub base: &'a Path,
    pub out: &'a Path,
    pub report: &'a mut ReportBody,
}

impl Run<'_> {
    pub fn write_csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        table.write(&self.out.join(name))?;
        let files = self.report.results.entry("files").or_insert_with(|| serde_json::Value::Array(Vec::new()));
        if let serde_json::Value::Array(v) = files {
            v.push(name.into());
        }
        Ok(())
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.report.warnings.push(msg.into());
    }

    /// Seeded samples from `region` (or the system region).
    pub fn samples(&self, region: Option<&RegionConfig>, count: usize, path: &str) -> Result<Vec<ExtendedPoint>, ConfigError> {
        if count == 0 {
            return Err(ConfigError::new(path, "need at least one sample"));
        }
        Ok(match region {
            Some(r) => build::region(r, self.sys.n(), &format!("{path}.region"))?.sample(count, self.seed),
            None => self.sys.region().sample(count, self.seed),
        })
    }
}

/// The command's config block, or a config error naming it.
pub fn block<'a, T>(b: &'a Option<T>, key: &str, command: Command) -> Result<&'a T, ConfigError> {
    b.as_ref().ok_or_else(|| ConfigError::new(key, format!("missing: required by the `{}` command", command.name())))
}

pub fn run(command: Command, run: &mut Run<'_>) -> Result<()> {
    match command {
        Command::Simulate => simulate::simulate(run),
        Command::CheckDynamics => checks::dynamics(run),
        Command::CheckLiouville => checks::liouville(run),
        Command::CheckSymmetry => checks::symmetry(run),
        Command::Invariant => invariant::invariant(run),
        Command::Momentum => momentum::momentum(run),
        Command::Action => action::action(run),
        Command::Convergence => convergence::convergence(run),
    }
}

/// Relative drift `max |h − h₀| / |h₀|` (absolute when `h₀ = 0`).
pub(crate) fn relative_drift(values: &[f64]) -> f64 {
    let v0 = values[0];
    let d = values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max);
    if v0 == 0.0 {
        d
    } else {
        d / v0.abs()
    }
}
