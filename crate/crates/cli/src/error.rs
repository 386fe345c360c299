use netpulse_core::data::DataError;
use netpulse_core::session::SessionError;
use netpulse_core::trace::{TraceError, Violation};
use thiserror::Error;

/// Process exit codes. No other code is ever returned.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DATA: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration, flags or input arity.
    #[error("{0}")]
    Config(String),
    /// Unreadable or malformed dataset, trace, model or output file.
    #[error("{0}")]
    Data(String),
    /// A trace broke a rule of the event protocol.
    #[error("{rule} violation at seq {seq}: {detail}", rule = .0.rule.name(), seq = .0.seq, detail = .0.detail)]
    Violation(Violation),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Data(_) => exit::DATA,
            CliError::Violation(_) => exit::VIOLATION,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Trace(TraceError::Parse { .. } | TraceError::Io(_)) => CliError::Data(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<Violation> for CliError {
    fn from(v: Violation) -> Self {
        CliError::Violation(v)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
