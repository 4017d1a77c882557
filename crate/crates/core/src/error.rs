use thiserror::Error;

/// Errors produced by the twostar toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("critical point: limit constants undefined at theta = ({theta1}, {theta2})")]
    CriticalPoint { theta1: f64, theta2: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("exact enumeration supports 2 <= n <= {max}, got n = {n}")]
    EnumerationRange { n: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
