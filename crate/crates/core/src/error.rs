use thiserror::Error;

/// Which flank of a spectral feature ran off the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular response at omega_d = {omega_d:e} rad/s: {detail}")]
    Singular { omega_d: f64, detail: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("solver error at omega_d = {omega_d:e} rad/s: {detail}")]
    Solver { omega_d: f64, detail: String },

    #[error("time integration did not settle by t = {t:e} s (last residual {residual:e})")]
    Timeout { t: f64, residual: f64 },

    #[error("{side} flank of the feature at {center:e} rad/s is not bracketed by the grid")]
    Range { side: Side, center: f64 },

    #[error("fit failed: {detail} (last rms residual {residual:e})")]
    Fit { detail: String, residual: f64 },

    #[error("ambiguous spectrum: {0}")]
    Ambiguous(String),
}

impl Error {
    /// Attaches a drive frequency to errors raised by evaluators that only see detunings.
    pub fn at(self, omega_d: f64) -> Self {
        match self {
            Error::Singular { detail, .. } => Error::Singular { omega_d, detail },
            Error::Solver { detail, .. } => Error::Solver { omega_d, detail },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
