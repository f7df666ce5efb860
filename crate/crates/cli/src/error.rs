use thiserror::Error;

/// Failures that map to distinct process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver did not converge after {iterations} iterations (gap {gap:?})")]
    NotConverged { iterations: usize, gap: Option<f64> },
    #[error("{failed} of {total} assertions failed")]
    AssertionFailed { failed: usize, total: usize },
    #[error("incomplete run: {0}")]
    IncompleteRun(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::AssertionFailed { .. } => 1,
            CliError::Config(_) => 2,
            CliError::NotConverged { .. } => 3,
            CliError::IncompleteRun(_) => 4,
            CliError::Runtime(_) => 5,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(anyhow::anyhow!("{e}"))
}
