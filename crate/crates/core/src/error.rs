//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the library.
///
/// Validation problems (bad sizes, out-of-range parameters, malformed text)
/// are kept apart from numerical failures so that front ends can map them to
/// different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A requested Hilbert space or matrix exceeds the supported size.
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),
    /// Text input (root tilings, bit strings, ranges) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// An iterative eigensolver hit its iteration cap.
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    /// Eigenvalues sit too close to the zero threshold to count a kernel.
    #[error("ill-separated spectrum: {0}")]
    IllSeparated(String),
    /// A numerically detected kernel disagrees with the expected dimension.
    #[error("kernel dimension mismatch: expected {expected}, found {found}")]
    KernelMismatch { expected: usize, found: usize },
}

impl Error {
    /// True for failures caused by the inputs rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::DimensionOverflow(_) | Error::Parse(_)
        )
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
