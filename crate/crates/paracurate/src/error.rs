use std::path::{Path, PathBuf};

use paracurate_core::{JoinError, ManifestError, StatsError, VariantError};
use thiserror::Error;

use crate::jats::JatsError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {source}", path.display())]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Jats {
        path: PathBuf,
        #[source]
        source: JatsError,
    },
    #[error("article {0} appears in more than one input file")]
    DuplicateArticle(String),
    #[error(transparent)]
    Join(#[from] JoinError),
    #[error(transparent)]
    Variant(#[from] VariantError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}
