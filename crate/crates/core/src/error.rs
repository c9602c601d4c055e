use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Ragged or out-of-range tables, missing identities and similar problems
    /// that make a structure unusable before any law can be checked.
    #[error("malformed algebra: {0}")]
    Structural(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("formula role error: {0}")]
    Role(String),

    #[error("size limit exceeded: {what} would exceed {limit}")]
    SizeLimit { what: String, limit: usize },

    #[error("not a reachability ideal: {below} is reachable from {member} but not in the set")]
    IdealViolation { member: String, below: String },

    #[error("not an EF-algebra: v={v}, h={h} gives vh+h != vh")]
    NotEfAlgebra { v: String, h: String },

    #[error("homomorphism is not {k}-definite")]
    NotKDefinite { k: usize },

    #[error("homomorphism is confusing on reachability class {{{class}}}")]
    NotNonconfusing { class: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn size(what: impl Into<String>, limit: usize) -> Self {
        Error::SizeLimit {
            what: what.into(),
            limit,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
