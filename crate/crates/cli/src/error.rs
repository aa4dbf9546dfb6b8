use std::path::PathBuf;

use erasure_ft::arith::{to_f64, Rational};
use erasure_ft::circuits::ConfigError;
use erasure_ft::erasure::ParsePatternError;
use erasure_ft::{ClassUnsound, ThresholdError};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
#[allow(clippy::large_enum_variant)]
pub enum CliError {
    #[error(transparent)]
    Pattern(#[from] ParsePatternError),
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("invalid grid {grid:?}: {reason}")]
    Grid { grid: String, reason: &'static str },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("circuit config {path}: {source}")]
    ConfigFile {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid polynomial JSON: {0}")]
    PolyJson(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Unsound(#[from] ClassUnsound),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Pattern(_) => "parse-pattern",
            CliError::Number(_) => "parse-number",
            CliError::Grid { .. } => "parse-grid",
            CliError::Config(_) | CliError::ConfigFile { .. } => "circuit-config",
            CliError::PolyJson(_) => "poly-json",
            CliError::Io { .. } => "io",
            CliError::Threshold(ThresholdError::NoSignChange { .. }) => "no-sign-change",
            CliError::Threshold(_) => "threshold",
            CliError::Unsound(_) => "class-unsound",
            CliError::Usage(_) => "usage",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        if let CliError::Threshold(ThresholdError::NoSignChange { lo, hi, g_lo, g_hi }) = self {
            v["samples"] = json!([
                { "x": to_f64(lo), "x_exact": exact(lo), "recursion_minus_condition": to_f64(g_lo) },
                { "x": to_f64(hi), "x_exact": exact(hi), "recursion_minus_condition": to_f64(g_hi) },
            ]);
        }
        v
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub fn exact(r: &Rational) -> String {
    r.to_string()
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
