//! Run reports. The body is a pure function of the config bytes and seed;
//! wall time sits outside it.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;

pub const TOOL: &str = "nambu-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Comparison::AtMost => value <= tol,
            Comparison::AtLeast => value >= tol,
            Comparison::Above => value > tol,
        }
    }
}

/// One asserted tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportBody {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub scenario: Option<String>,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub config: Option<ScenarioConfig>,
    pub checks: Vec<Check>,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    body: &'a ReportBody,
    wall_time_seconds: f64,
}

impl ReportBody {
    pub fn new(command: &str, config_bytes: &[u8]) -> Self {
        ReportBody {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            scenario: None,
            config_sha256: sha256_hex(config_bytes),
            seed: None,
            config: None,
            checks: Vec::new(),
            results: Map::new(),
            warnings: Vec::new(),
            passed: false,
            error: None,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, value: f64, tol: f64, comparison: Comparison) -> bool {
        let passed = comparison.holds(value, tol);
        self.checks.push(Check { name: name.into(), value, tol, comparison, passed });
        passed
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.results.insert(key.into(), v);
    }

    pub fn all_passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report body serializes")
    }

    pub fn write(&self, out: &Path, wall_time_seconds: f64) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&Report { body: self, wall_time_seconds }).expect("report serializes");
        std::fs::write(out.join("report.json"), text + "\n")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
