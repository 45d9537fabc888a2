use std::path::PathBuf;

use thiserror::Error;
use wsn_core::ConfigError;

use crate::sweep::Axis;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: `{key}` already set on line {first}")]
    DuplicateKey { key: String, line: usize, first: usize },
    #[error("line {line}: `{key}` expects {expected}, got `{value}`")]
    InvalidValue { key: String, line: usize, value: String, expected: &'static str },
    #[error("{}{key} = {value} is out of range (expected {expected})", line_prefix(*.line))]
    OutOfRange { key: String, line: Option<usize>, value: String, expected: String },
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("cell {axis}={value} seed={seed} defense={}: {source}", on_off(*.defense))]
    Cell { axis: Axis, value: f64, seed: u64, defense: bool, source: ConfigError },
    #[error("malformed results file: {0}")]
    Csv(String),
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

pub(crate) fn on_off(flag: bool) -> &'static str {
    if flag {
        "on"
    } else {
        "off"
    }
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Syntax { .. } => "syntax",
            CliError::UnknownKey { .. } => "unknown_key",
            CliError::DuplicateKey { .. } => "duplicate_key",
            CliError::InvalidValue { .. } => "invalid_value",
            CliError::OutOfRange { .. } => "out_of_range",
            CliError::Sweep(_) => "sweep",
            CliError::UnknownScenario(_) => "unknown_scenario",
            CliError::Cell { .. } => "cell",
            CliError::Csv(_) => "csv",
        }
    }

    pub fn key(&self) -> Option<&str> {
        match self {
            CliError::UnknownKey { key, .. }
            | CliError::DuplicateKey { key, .. }
            | CliError::InvalidValue { key, .. }
            | CliError::OutOfRange { key, .. } => Some(key),
            CliError::Cell { source: ConfigError::OutOfRange { key, .. }, .. } => Some(key),
            _ => None,
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            CliError::Syntax { line }
            | CliError::UnknownKey { line, .. }
            | CliError::DuplicateKey { line, .. }
            | CliError::InvalidValue { line, .. } => Some(*line),
            CliError::OutOfRange { line, .. } => *line,
            _ => None,
        }
    }

    /// One `error code=... key=... line=... message="..."` line for stderr.
    pub fn machine_line(&self) -> String {
        let mut out = format!("error code={}", self.code());
        if let Some(k) = self.key() {
            out.push_str(&format!(" key={k}"));
        }
        if let Some(l) = self.line() {
            out.push_str(&format!(" line={l}"));
        }
        if let CliError::Cell { axis, value, seed, defense, .. } = self {
            out.push_str(&format!(" axis={axis} value={value} seed={seed} defense={}", on_off(*defense)));
        }
        out.push_str(&format!(" message={:?}", self.to_string()));
        out
    }
}
