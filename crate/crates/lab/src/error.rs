use std::fmt;

/// Exit codes of the CLI.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// A configuration problem located by its JSON field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error at {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numeric(#[from] nambu_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => EXIT_CONFIG,
            LabError::Numeric(_) => EXIT_NUMERIC,
            LabError::Io(_) | LabError::Csv(_) => EXIT_NUMERIC,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

/// Attaches a field path to core errors raised while building objects from
/// the config (bad expressions, wrong arity, ...).
pub trait AtPath<T> {
    fn at(self, path: &str) -> Result<T, ConfigError>;
}

impl<T, E: fmt::Display> AtPath<T> for std::result::Result<T, E> {
    fn at(self, path: &str) -> Result<T, ConfigError> {
        self.map_err(|e| ConfigError::new(path, e.to_string()))
    }
}
