use thiserror::Error;

/// Errors raised by the multiplex toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("matrix dimensions overflow usize")]
    DimensionOverflow,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integration diverged at step {step} (node {node} is not finite)")]
    Divergence { step: usize, node: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (relative off-diagonal mass {off_diagonal:e})")]
    NotConverged { sweeps: usize, off_diagonal: f64 },

    #[error("{which} state is not an equilibrium (residual {residual:e} > {tolerance:e})")]
    NotEquilibrium {
        which: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("order parameter of an empty state is undefined")]
    EmptyState,

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotSquare { .. } => "not_square",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::NonFinite { .. } => "non_finite",
            Error::DimensionOverflow => "dimension_overflow",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Divergence { .. } => "divergence",
            Error::NotConverged { .. } => "not_converged",
            Error::NotEquilibrium { .. } => "not_equilibrium",
            Error::EmptyState => "empty_state",
            Error::Config { .. } => "config",
            Error::UnknownScenario(_) => "unknown_scenario",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
