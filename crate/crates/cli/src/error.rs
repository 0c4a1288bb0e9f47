use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] rescat::Error),

    /// A requested analysis step failed after the spectrum was written.
    #[error("analysis failed: {0}")]
    Analysis(rescat::Error),

    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("maximum deviation {max:e} exceeds tolerance {tol:e}")]
    Tolerance { max: f64, tol: f64 },
}

/// Machine-readable form of a [`CliError`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    /// 2 for config and usage problems, 3 for solver failures, 4 for analysis
    /// failures, 1 for output failures and exceeded compare tolerances.
    pub fn exit_code(&self) -> i32 {
        use rescat::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Domain(_) | E::Usage(_)) => 2,
            CliError::Core(E::Singular { .. } | E::Solver { .. } | E::Timeout { .. }) => 3,
            CliError::Core(E::Range { .. } | E::Fit { .. } | E::Ambiguous(_)) | CliError::Analysis(_) => 4,
            CliError::Io { .. } | CliError::Tolerance { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use rescat::Error as E;
        let core = |e: &E| match e {
            E::Domain(_) => "domain",
            E::Usage(_) => "usage",
            E::Singular { .. } => "singular",
            E::Solver { .. } => "solver",
            E::Timeout { .. } => "timeout",
            E::Range { .. } => "range",
            E::Fit { .. } => "fit",
            E::Ambiguous(_) => "ambiguous",
        };
        match self {
            CliError::Config(_) => "config",
            CliError::Core(e) | CliError::Analysis(e) => core(e),
            CliError::Io { .. } => "io",
            CliError::Tolerance { .. } => "tolerance",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord { kind: self.kind(), exit_code: self.exit_code(), message: self.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
