use thiserror::Error;

pub type Result<T> = std::result::Result<T, RaeError>;

#[derive(Debug, Error)]
pub enum RaeError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no closed-form expectation for {pauli} under {ansatz}; use the exact oracle")]
    NoClosedForm { ansatz: String, pauli: String },

    #[error("{n} qubits exceeds the dense-oracle limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    /// The parameters cannot be recovered from the supplied data or schedule.
    #[error("unidentifiable: {0}")]
    Unidentifiable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("missing estimates for terms: {}", .0.join(", "))]
    MissingTerms(Vec<String>),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl RaeError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        RaeError::Domain(msg.into())
    }
}
