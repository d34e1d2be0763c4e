use std::path::PathBuf;

use thiserror::Error;

use crate::wave::Space;

#[derive(Debug, Error)]
pub enum RotError {
    #[error("wave function is in {found:?} space, operation needs {expected}")]
    Space { expected: &'static str, found: Space },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] rotsplit_core::Error),
    #[error("decomposition failed at t = {t}, h = {h}: {source}")]
    Solver {
        t: f64,
        h: f64,
        source: rotsplit_core::Error,
    },
    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },
    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, RotError>;
