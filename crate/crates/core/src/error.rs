use std::path::PathBuf;

use thiserror::Error;

use crate::insensitivity::Infeasibility;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible alternate parameters: {0}")]
    Infeasible(Infeasibility),

    #[error("no interior stationary point: the exponent perturbation is zero")]
    NoStationaryPoint,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("integration became unstable at t = {time} s")]
    Unstable { time: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("ground-motion synthesis exhausted {retries} retries without meeting the PGA cap of {cap} m/s^2; lower the spectral intensity or raise the cap")]
    RetryBudget { retries: u32, cap: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end: 2 for bad input,
    /// 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unstable { .. } | Error::Numerical(_) | Error::NoStationaryPoint | Error::RetryBudget { .. } => 3,
            _ => 2,
        }
    }
}
