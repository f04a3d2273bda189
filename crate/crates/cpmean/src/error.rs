// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong inside the library.
///
/// Data problems and parameter problems are kept apart so front ends can map
/// them to different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input series is empty")]
    EmptySeries,
    #[error("non-finite value at position {index} (1-based)")]
    NonFinite { index: usize },
    #[error("index out of range: {0}")]
    Index(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("set sizes differ ({left} vs {right})")]
    Cardinality { left: usize, right: usize },
    #[error("replication {rep} failed: {source}")]
    Replication { rep: usize, source: Box<Error> },
}

impl Error {
    /// True for errors caused by the data rather than by the caller's settings.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::EmptySeries | Error::NonFinite { .. } | Error::Degenerate(_) => true,
            Error::Replication { source, .. } => source.is_data_error(),
            _ => false,
        }
    }
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
