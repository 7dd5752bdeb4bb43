//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hard size guard was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Root bracketing or iteration failed.
    #[error("solver failed: {0}")]
    Solver(String),

    /// Cancellation beyond the precision budget; the log-domain dynamic
    /// program should be used instead.
    #[error("accuracy budget exceeded: {0}")]
    Accuracy(String),

    /// The requested pair count cannot be hosted by the spectrum.
    #[error("infeasible filling: {0}")]
    InfeasibleFilling(String),

    /// `χ_N` vanishes at the denominator of a ratio.
    #[error("undefined ratio: normalization factor vanishes at the denominator")]
    UndefinedRatio,

    /// Mode index outside the retained spectrum.
    #[error("unknown mode index {0}")]
    UnknownMode(usize),

    /// Density grid narrower than the orbital support.
    #[error("grid does not cover the required span: {0}")]
    GridCoverage(String),

    /// Analytic orbital basis disagrees with the grid Schmidt decomposition.
    #[error("orbital basis failed oracle validation; per-mode overlaps {overlaps:?}")]
    BasisValidation { overlaps: Vec<f64> },

    /// Grid Schmidt spectrum did not converge under refinement.
    #[error("grid spectrum not converged: {0}")]
    Resolution(String),
}
