use std::io;

use thiserror::Error;

use crate::graph::VarId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable dimension must be at least 1")]
    ZeroDimension,
    #[error("unknown variable id {0}")]
    UnknownVariable(VarId),
    #[error("variable {0} appears more than once in a factor")]
    DuplicateVariable(VarId),
    #[error("factor must reference at least one variable")]
    EmptyFactor,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
    #[error("integer overflow while accumulating {0}")]
    Overflow(&'static str),
    #[error("variable {0} is not scalar (dim > 1)")]
    NonScalar(VarId),
    #[error("graph has {size} variables, exhaustive search supports at most {max}")]
    GraphTooLarge { size: usize, max: usize },
    #[error("graph has no variables")]
    EmptyGraph,
    #[error(
        "matrix is not positive definite: pivot {pivot} (scalar index {scalar_index}) is {value}"
    )]
    NotPositiveDefinite {
        pivot: usize,
        scalar_index: usize,
        value: f64,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("series must have equal length of at least 3 (got {0} and {1})")]
    SeriesLength(usize, usize),
    #[error("series has zero variance")]
    DegenerateVariance,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors caused by bad user input rather than by a failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ZeroDimension
                | Error::UnknownVariable(_)
                | Error::DuplicateVariable(_)
                | Error::EmptyFactor
                | Error::Parse { .. }
                | Error::InvalidOrdering(_)
                | Error::NonScalar(_)
                | Error::GraphTooLarge { .. }
                | Error::EmptyGraph
                | Error::InvalidConfig(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
