//! Command line error type with stable machine-readable codes and exit
//! statuses.

use std::fmt;
use std::path::PathBuf;

use chaincast_core::Error as EngineError;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    /// An input path does not exist or cannot be opened.
    InputNotFound { path: PathBuf },
    /// A file exists but its content cannot be parsed; `row` is 1-based.
    Parse {
        path: PathBuf,
        row: Option<usize>,
        detail: String,
    },
    /// Invalid flag, config-file entry or parameter combination.
    Config { detail: String },
    /// The engine rejected the data or configuration.
    Engine(EngineError),
    /// An output file could not be written.
    Output { path: PathBuf, detail: String },
}

impl CliError {
    pub fn config(detail: impl Into<String>) -> Self {
        CliError::Config {
            detail: detail.into(),
        }
    }

    /// Machine-readable error code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::InputNotFound { .. } => "input_not_found",
            CliError::Parse { .. } => "parse_error",
            CliError::Config { .. } => "config_error",
            CliError::Engine(e) => match e {
                EngineError::InvalidConfig { .. } => "config_error",
                _ => "data_error",
            },
            CliError::Output { .. } => "output_error",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.code() {
            "input_not_found" => 2,
            "parse_error" => 3,
            "config_error" => 4,
            "data_error" => 5,
            "output_error" => 6,
            _ => 1,
        }
    }

    /// The `{code, message, context}` document printed on failure.
    pub fn to_json(&self) -> serde_json::Value {
        let context = match self {
            CliError::InputNotFound { path } => json!({ "path": path.display().to_string() }),
            CliError::Parse { path, row, .. } => {
                json!({ "path": path.display().to_string(), "row": row })
            }
            CliError::Config { .. } => json!({}),
            CliError::Engine(e) => match e {
                EngineError::Level { step, .. } => json!({ "level": step }),
                _ => json!({}),
            },
            CliError::Output { path, .. } => json!({ "path": path.display().to_string() }),
        };
        json!({
            "code": self.code(),
            "message": self.to_string(),
            "context": context,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::InputNotFound { path } => {
                write!(f, "input not found: {}", path.display())
            }
            CliError::Parse { path, row, detail } => match row {
                Some(row) => write!(f, "{}: row {row}: {detail}", path.display()),
                None => write!(f, "{}: {detail}", path.display()),
            },
            CliError::Config { detail } => write!(f, "{detail}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Output { path, detail } => {
                write!(f, "cannot write {}: {detail}", path.display())
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Engine(e)
    }
}
