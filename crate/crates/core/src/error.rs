use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent sizes, grids or parameter combinations.
    #[error("configuration error: {0}")]
    Config(String),

    /// A structural invariant of the data was violated (broken Hermitian
    /// symmetry, nonzero mode 0 in a mean-zero slot, ...).
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A parameter lies outside the domain of the requested formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A coefficient exceeded the overflow threshold or became non-finite
    /// during time integration.
    #[error("solution blow-up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },

    /// The irrationality exponent could not be resolved for the supplied
    /// coupling value.
    #[error("unresolved irrationality exponent: {0}")]
    UnresolvedMu(String),

    /// A diagnostic routine could not run on the supplied data (trajectory
    /// too sparse, missing samples, ...).
    #[error("diagnostic error: {0}")]
    Diagnostic(String),

    /// A floating-point denominator landed inside the zero-classification
    /// band and cannot be classified without exact arithmetic.
    #[error("ambiguous resonance denominator: {0}")]
    AmbiguousDenominator(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
