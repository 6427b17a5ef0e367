use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] los_glm::Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 input/validation, 3 schema or level mismatch, 4 numerical failure.
    pub fn exit_code(&self) -> u8 {
        use los_glm::Error as E;
        match self {
            CliError::Core(E::Schema(_) | E::UnseenLevel { .. }) => 3,
            CliError::Core(E::SingularDesign(_) | E::Numerical(_) | E::Inference(_)) => 4,
            _ => 2,
        }
    }
}
