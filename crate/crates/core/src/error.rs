use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// Header or column-set mismatch between a file and its schema, or
    /// between a model and the data it is applied to.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at data row {row}, column `{column}`: {message}")]
    Parse {
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        message: String,
    },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("factor `{variable}` has level `{level}` that is not in its level specification")]
    UnseenLevel { variable: String, level: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular design: column `{0}` is linearly dependent on earlier columns")]
    SingularDesign(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("inference error: {0}")]
    Inference(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
