use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Input` and `Parse` are caller mistakes; `Limit` means a configured size
/// bound refused the instance; `Internal` means a consistency check fired.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("redundant join eta({i},{j}) at node {node}: {existing} of {possible} edges already present")]
    Redundant {
        node: usize,
        i: u32,
        j: u32,
        existing: usize,
        possible: usize,
    },

    #[error("partially redundant join eta({i},{j}) at node {node}: {existing} of {possible} edges already present")]
    PartialRedundancy {
        node: usize,
        i: u32,
        j: u32,
        existing: usize,
        possible: usize,
    },

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
