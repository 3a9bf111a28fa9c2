use std::path::PathBuf;

use crate::data::Split;

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error(transparent)]
    Core(#[from] hyqurp_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("checkpoint field `{field}`: {msg}")]
    Checkpoint { field: String, msg: String },
    #[error("{0} split is empty")]
    EmptySplit(Split),
    #[error("non-finite loss at epoch {epoch}, batch {batch} (lr {lr}): the training loss did not stay finite")]
    NonFinite { epoch: usize, batch: usize, lr: f64 },
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, TrainError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> TrainError {
    let path = path.into();
    move |source| TrainError::Io { path, source }
}
