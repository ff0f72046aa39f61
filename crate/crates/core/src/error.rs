use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("wrong table kind: {0}")]
    WrongKind(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("invalid clique: {0}")]
    InvalidClique(String),

    #[error("construction failure: {0}")]
    ConstructionFailure(String),

    #[error("search failure: {0}")]
    SearchFailure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
