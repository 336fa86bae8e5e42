//! Error-to-exit-code mapping for the `falcon` binary.
//!
//! Every failure path funnels into [`CliError`], whose three variants fix
//! the process exit code: 2 for inputs that fail to parse (ontology, query,
//! checkpoint), 3 for invalid invocations or configuration, 4 for numeric
//! failures (non-finite losses, parameters, or gradients).

use falcon_core::checkpoint::CheckpointError;
use falcon_core::diff::DiffError;
use falcon_core::interpreter::InterpreterError;
use falcon_core::metrics::MetricsError;
use falcon_core::ontology::ParseError;
use falcon_core::training::TrainError;
use thiserror::Error;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    /// An input failed to parse: ontology text, query line, or checkpoint.
    #[error("{0}")]
    Parse(String),
    /// The invocation or configuration is invalid.
    #[error("{0}")]
    Config(String),
    /// Numbers went bad: non-finite loss, parameters, or gradients.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn parse(message: impl Into<String>) -> Self {
        CliError::Parse(message.into())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<DiffError> for CliError {
    fn from(e: DiffError) -> Self {
        match e {
            DiffError::NonFinite { .. }
            | DiffError::NonFiniteParam { .. }
            | DiffError::NonFiniteGradient { .. } => CliError::Numeric(e.to_string()),
            // Everything else means a checkpoint or model description does
            // not hang together.
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<InterpreterError> for CliError {
    fn from(e: InterpreterError) -> Self {
        match e {
            InterpreterError::Diff(inner) => inner.into(),
            InterpreterError::DegreeOutOfRange { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Interpreter(inner) => inner.into(),
            TrainError::Diff(inner) => inner.into(),
            TrainError::NonFiniteLoss { .. } => CliError::Numeric(e.to_string()),
            TrainError::Config(_) | TrainError::ZeroWeight => CliError::Config(e.to_string()),
        }
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        match e {
            CheckpointError::Io(inner) => CliError::Config(inner.to_string()),
            CheckpointError::Diff(inner) => inner.into(),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}
