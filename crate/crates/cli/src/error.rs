use std::path::Path;

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] mex_core::Error),
    /// Some REPL statements raised errors; they were reported as they happened.
    #[error("{0} statement(s) failed")]
    StatementsFailed(usize),
    #[error("{0}")]
    CheckFailed(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Engine(_) | CliError::StatementsFailed(_) => 2,
            CliError::CheckFailed(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}
