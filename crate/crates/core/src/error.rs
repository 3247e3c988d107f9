use thiserror::Error;

/// Errors raised across the solver stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A physical quantity left its admissible domain (ρ ≤ 0, p ≤ 0, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Inconsistent shapes, missing data or malformed topology.
    #[error("structural error: {0}")]
    Structural(String),
    /// Query outside the support of a function or grid.
    #[error("range error: {0}")]
    Range(String),
    #[error("CFL violation at node {node}: dt*|u| = {courant:.6} * dx")]
    Cfl { node: usize, courant: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
