//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, XyError>;

#[derive(Debug, Error)]
pub enum XyError {
    /// Invalid configuration (bad distribution parameters, malformed
    /// geometry, unknown fields in a config file, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numeric routine failed (eigensolver did not converge, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An exact structural identity was violated beyond tolerance; this
    /// signals a broken symmetry upstream, not a tolerance issue.
    #[error("structural error: {0}")]
    Structural(String),

    /// The one-particle spectrum has a gap below the simplicity tolerance;
    /// the disorder sample must be discarded.
    #[error("degenerate spectrum: minimum gap {gap:.3e} <= {tol:.3e}")]
    Degenerate { gap: f64, tol: f64 },

    /// Site or block index outside `[1, n]`.
    #[error("index out of range: {0}")]
    Range(String),

    /// Dense-oracle size guard (`2^n` space too large).
    #[error("size guard: n = {n} exceeds limit {limit} for {what}")]
    SizeGuard { n: usize, limit: usize, what: &'static str },

    /// A correlation matrix left the physical window `[0, 1]` by more than
    /// the corruption tolerance.
    #[error("state corruption: eigenvalue {value:.6e} outside [0,1] window")]
    StateCorruption { value: f64 },

    /// All correlator values in the fit window are below the floor.
    #[error("underflow: {0}")]
    Underflow(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl XyError {
    pub fn config(msg: impl Into<String>) -> Self {
        XyError::Config(msg.into())
    }

    pub fn structural(msg: impl Into<String>) -> Self {
        XyError::Structural(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        XyError::Numeric(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        XyError::Range(msg.into())
    }
}
