use thiserror::Error;

/// Errors produced by the analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a valid metric: {0}")]
    InvalidMetric(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("space is not quasihypermetric")]
    NotQuasihypermetric,

    #[error(
        "space is not quasihypermetric: centered form has eigenvalue {eigenvalue:.6e} \
         along the mass-zero direction {direction:?}"
    )]
    NotNegativeSemidefinite {
        eigenvalue: f64,
        direction: Vec<f64>,
    },

    #[error("obtuse angle at point {at} formed with points {other_a} and {other_b}")]
    ObtuseTriple {
        at: usize,
        other_a: usize,
        other_b: usize,
    },

    #[error("enumeration needs {needed} candidates, above cap {cap}")]
    EnumerationBudget { needed: u128, cap: u128 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("gave up after {0} attempts")]
    AttemptsExhausted(usize),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
