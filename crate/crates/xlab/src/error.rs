use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum XlabError {
    /// Bad or missing experiment parameters; maps to the usage exit code.
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Toolkit(#[from] spikeres::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl XlabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        XlabError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_usage(&self) -> bool {
        matches!(self, XlabError::Spec(_))
    }
}

pub type Result<T> = std::result::Result<T, XlabError>;
