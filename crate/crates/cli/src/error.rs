use std::path::Path;

use resiliency_core::Error as CoreError;

/// Exit codes of the `resiliency` binary.
pub mod exit {
    pub const OK: u8 = 0;
    pub const RUNTIME: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const MODEL: u8 = 3;
    pub const INSUFFICIENT_DATA: u8 = 4;
    pub const EVENTS: u8 = 5;
    pub const PRECONDITION: u8 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or unparsable input file.
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    InsufficientData(String),
    #[error("{context}: {source}")]
    Core { context: String, source: CoreError },
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            context: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::InsufficientData(_) => exit::INSUFFICIENT_DATA,
            CliError::Core { source, .. } => core_exit_code(source),
            CliError::Io { .. } => exit::RUNTIME,
        }
    }
}

pub fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::InvalidParameter { .. } | CoreError::Domain(_) => exit::CONFIG,
        CoreError::ModelValidity(_) | CoreError::Singularity(_) => exit::MODEL,
        CoreError::InsufficientData { .. } | CoreError::InsufficientEvents { .. } => {
            exit::INSUFFICIENT_DATA
        }
        CoreError::EventValidation(_) => exit::EVENTS,
        CoreError::Precondition(_) => exit::PRECONDITION,
        CoreError::Convergence { .. } => exit::RUNTIME,
    }
}
