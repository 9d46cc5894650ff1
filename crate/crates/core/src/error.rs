use thiserror::Error;

use crate::rational::ParseRationalError;

/// Errors raised by operations whose preconditions or inputs are invalid.
///
/// Failed certifications are not errors: they are carried as `Fail` records
/// inside a [`crate::report::CertReport`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("derivation failed: {0}")]
    Derivation(String),

    #[error("non-Archimedean violation: {0}")]
    NonArchimedean(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Rational(#[from] ParseRationalError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
