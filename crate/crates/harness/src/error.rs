use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the experiment runner, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config file {path}, line {line}: {message}")]
    ConfigSyntax { path: PathBuf, line: usize, message: String },

    #[error("integration failed at step {step}: {source}")]
    Integration {
        step: usize,
        #[source]
        source: enhanced_cs::Error,
    },

    #[error("{0}")]
    Numerical(#[from] enhanced_cs::Error),

    #[error("condition check failed: {0}")]
    Conditions(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// 1 for usage errors, 2 for integration failures, 3 for failed condition checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) | HarnessError::ConfigSyntax { .. } | HarnessError::Io { .. } => 1,
            HarnessError::Integration { .. } | HarnessError::Numerical(_) => 2,
            HarnessError::Conditions(_) => 3,
        }
    }

    /// Lifts a core error, pulling the step index out of step failures.
    pub(crate) fn from_core(error: enhanced_cs::Error) -> Self {
        match error {
            enhanced_cs::Error::StepFailed { step, source } => HarnessError::Integration { step, source: *source },
            other => HarnessError::Numerical(other),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
