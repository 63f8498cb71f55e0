use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    /// A numerator or denominator exceeded the configured degree cap.
    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("input error: {0}")]
    Input(String),

    /// The requested solution branch does not match the parameters (q = 1 vs q != 1).
    #[error("branch error: {0}")]
    Branch(String),

    /// Reconstruction anchors at which the generator behaves multiplicatively.
    #[error("degenerate anchors: {0}")]
    Anchor(String),

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    /// Parse failure; `column` is 1-based.
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
