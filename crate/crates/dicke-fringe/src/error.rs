//! Error type shared by all modules.

use crate::qcore::Basis;

/// Library-wide error type.
///
/// CLI exit-code mapping: usage errors exit 1 (handled by the argument
/// parser), every variant below exits 2 (numeric/domain error), acceptance
/// failures exit 3 (handled by the `check` command).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A direction vector supposed to be unit length is not.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// An operation received a state tagged with the wrong basis.
    #[error("basis mismatch: expected {expected:?}, found {found:?}")]
    BasisMismatch { expected: Basis, found: Basis },

    /// Ω = 0: no fluorescence, correlations and steady-state ratios undefined.
    #[error("degenerate drive: Ω = 0 emits no fluorescence, so steady-state ratios and correlations are undefined")]
    DegenerateDrive,

    /// Input outside an operation's domain (negative time, empty grid, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Conditioning on a detection with zero probability.
    #[error("no photon: detection probability is zero for this state and direction")]
    NoPhoton,

    /// The steady-state solve found a (numerically) multidimensional kernel.
    #[error("singular steady state: the generator kernel is not one-dimensional (residual/kernel diagnostics: {0})")]
    SingularSteadyState(String),

    /// A matrix failed the density-matrix invariants.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// An I/O failure while writing command output.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
