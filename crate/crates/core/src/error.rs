use thiserror::Error;

use crate::excitation::SymmetryReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),

    /// `sin φ = 0` while a term divided by it is nonzero.
    #[error("singular configuration on the vertical axis (phi = {phi})")]
    Singular { phi: f64 },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },

    #[error("excitation breaks azimuthal symmetry (max residual {:.3e})", .0.max_residual())]
    SymmetryViolation(SymmetryReport),

    /// For B > 0 the number of critical points of the effective potential is odd.
    #[error("root finder returned {count} equilibria, expected 1 or 3")]
    InconsistentCount { count: usize },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
