use thiserror::Error;

/// Errors for toolkit operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("register labeling: {0}")]
    Labeling(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("resource budget exceeded: {0}")]
    ResourceBudget(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
