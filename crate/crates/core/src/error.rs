use std::path::PathBuf;

use thiserror::Error;

use crate::types::SemanticRole;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("semantic object needs at least one concept code")]
    EmptyCodes,
    #[error("semantic object text is empty")]
    EmptyText,
    #[error("invalid span [{start}, {end})")]
    InvalidSpan { start: usize, end: usize },
    #[error("phrase has no tokens")]
    EmptyPhrase,
    #[error("phrase {phrase:?} already has role {existing}, cannot add it as {requested}")]
    RoleConflict {
        phrase: String,
        existing: SemanticRole,
        requested: SemanticRole,
    },
    #[error("unknown semantic role {0:?}")]
    UnknownRole(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown analyzer {0:?}")]
    UnknownAnalyzer(String),
    #[error("invalid pipeline: {0}")]
    InvalidPipeline(String),
    #[error("invalid engine config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
