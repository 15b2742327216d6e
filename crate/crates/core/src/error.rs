//! Error taxonomy shared by every module.

/// Coarse classification of an [`Error`], used by callers (notably the CLI)
/// to map failures onto exit codes without string matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A value fed to an evaluator lies outside its mathematical domain.
    Domain,
    /// An index reached past the stored extent of a finite table or window.
    Range,
    /// A constructor rejected structurally invalid input.
    Validation,
    /// A checked hypothesis of an operation does not hold.
    Precondition,
    /// A computation could not be certified under the truncation policy.
    Truncation,
    /// A bracketing search never found a feasible point.
    Divergence,
    /// A bracketing search found every probed point feasible (degenerate input).
    Degeneracy,
    /// An internal re-check of a solver postcondition failed.
    Postcondition,
}

/// Library error. Payloads are plain strings plus, for truncation failures,
/// the partial value accumulated before giving up (widened to `f64`).
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("precondition error: {0}")]
    Precondition(String),
    #[error("truncation error: {msg} (partial value {partial:e})")]
    Truncation { msg: String, partial: f64 },
    #[error("divergence error: {0}")]
    Divergence(String),
    #[error("degeneracy error: {0}")]
    Degeneracy(String),
    #[error("postcondition failure: {0}")]
    Postcondition(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) => ErrorKind::Domain,
            Error::Range(_) => ErrorKind::Range,
            Error::Validation(_) => ErrorKind::Validation,
            Error::Precondition(_) => ErrorKind::Precondition,
            Error::Truncation { .. } => ErrorKind::Truncation,
            Error::Divergence(_) => ErrorKind::Divergence,
            Error::Degeneracy(_) => ErrorKind::Degeneracy,
            Error::Postcondition(_) => ErrorKind::Postcondition,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
