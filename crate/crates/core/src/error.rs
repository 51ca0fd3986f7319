use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Processing stage of the end-to-end link, used to tag propagated errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Config,
    Shaping,
    TxDsp,
    Frontend,
    Channel,
    RxDsp,
    Metrics,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Shaping => "shaping",
            Stage::TxDsp => "txdsp",
            Stage::Frontend => "frontend",
            Stage::Channel => "channel",
            Stage::RxDsp => "rxdsp",
            Stage::Metrics => "metrics",
            Stage::Output => "output",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("decode failure: {0}")]
    Decode(String),

    #[error("synchronization failed: {0}")]
    Sync(String),

    #[error("equalizer diverged: training MSE rose from {initial_mse:.3e} to {final_mse:.3e}")]
    Divergence { initial_mse: f64, final_mse: f64 },

    #[error("NGMI {ngmi:.4} is below the lowest code-rate threshold {lowest:.4}")]
    NoRate { ngmi: f64, lowest: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("[{stage}] {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Tags the error with the stage it originated in. Already-tagged errors
    /// keep their innermost stage.
    pub fn at(self, stage: Stage) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Stage the error was raised in, if it has been tagged.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub(crate) trait ResultExt<T> {
    fn at(self, stage: Stage) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn at(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
