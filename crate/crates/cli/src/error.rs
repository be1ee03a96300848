use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes. These are a stable contract.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const NOT_HERMITIAN: i32 = 4;
    pub const CONVERGENCE: i32 = 5;
    pub const VERIFICATION: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Model(#[from] fermidyn_core::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use fermidyn_core::Error as E;
        match self {
            Self::Config { .. } => exit::CONFIG,
            Self::Io { .. } | Self::Csv(_) => exit::IO,
            Self::Verification(_) => exit::VERIFICATION,
            Self::Model(e) => match e {
                E::Parse(_) | E::ModeOutOfRange { .. } => exit::PARSE,
                E::UnboundParameter(_)
                | E::UnsupportedModeCount(_)
                | E::InvalidState(_)
                | E::InvalidPlan(_) => exit::CONFIG,
                E::NotHermitian { .. } => exit::NOT_HERMITIAN,
                E::NoConvergence { .. } | E::DensityOutOfRange { .. } | E::NonFinite => {
                    exit::CONVERGENCE
                }
                E::StepTooLarge { .. } => exit::VERIFICATION,
                _ => exit::IO,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
