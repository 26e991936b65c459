//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by state validation, Fisher-information computations and
/// file I/O.
///
/// Each variant maps to a stable machine-readable code via [`Error::code`];
/// the CLI emits these codes verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("trace is {trace:.12} instead of 1")]
    TraceViolation { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator list is empty")]
    EmptyList,

    #[error("all eigenvalues fall below the support tolerance")]
    ZeroRank,

    #[error("distribution is singular: outcome {index} has p -> 0 with nonzero derivative (Fisher information diverges)")]
    SingularDistribution { index: usize },

    #[error("POVM elements do not resolve the identity (residual {residual:.3e})")]
    IncompleteMeasurement { residual: f64 },

    #[error("Kraus operators violate completeness (residual {residual:.3e})")]
    InvalidChannel { residual: f64 },

    #[error(
        "Kraus derivatives are inconsistent with trace preservation (residual {residual:.3e})"
    )]
    InconsistentDerivative { residual: f64 },

    #[error("operator does not satisfy the nSLD relation for the supplied derivative (residual {residual:.3e})")]
    IncompatibleNsld { residual: f64 },

    #[error(
        "model operators do not commute (norm {norm:.3e}); closed form requires a commuting set"
    )]
    NonCommuting { norm: f64 },

    #[error("state derivative has weight outside the state support (residual {residual:.3e})")]
    SingularState { residual: f64 },

    #[error(
        "derivative leaks outside the state support; the bound is unbounded (weight {weight:.3e})"
    )]
    Unbounded { weight: f64 },

    #[error("threshold diverges at q = {q}")]
    DivergentThreshold { q: f64 },

    #[error("bound diverges at x = 0")]
    DivergentBound,

    #[error("integrator became unstable (min eigenvalue {min_eigenvalue:.3e})")]
    Instability { min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    BadArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable error code, one per failure class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "non-square",
            Error::NonFinite => "non-finite",
            Error::NonHermitian { .. } => "non-hermitian",
            Error::TraceViolation { .. } => "trace-violation",
            Error::NotPositive { .. } => "not-positive",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::EmptyList => "empty-list",
            Error::ZeroRank => "zero-rank",
            Error::SingularDistribution { .. } => "singular-distribution",
            Error::IncompleteMeasurement { .. } => "incomplete-measurement",
            Error::InvalidChannel { .. } => "invalid-channel",
            Error::InconsistentDerivative { .. } => "inconsistent-derivative",
            Error::IncompatibleNsld { .. } => "incompatible-nsld",
            Error::NonCommuting { .. } => "non-commuting",
            Error::SingularState { .. } => "singular-state",
            Error::Unbounded { .. } => "unbounded",
            Error::DivergentThreshold { .. } => "divergent-threshold",
            Error::DivergentBound => "divergent-bound",
            Error::Instability { .. } => "instability",
            Error::BadArgument(_) => "bad-argument",
            Error::Io(_) => "io-error",
            Error::Json(_) => "malformed-json",
        }
    }
}
