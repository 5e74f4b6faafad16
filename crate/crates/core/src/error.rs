use thiserror::Error;

/// Errors produced by the search engine and its models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("illegal gene: {0}")]
    IllegalGene(String),

    /// The requested operator cannot be applied to this gene segment.
    #[error("operator {0} not applicable")]
    NotApplicable(&'static str),

    /// No feasible individual could be produced; `binding` names the
    /// constraint that rejected the most candidates.
    #[error("infeasible constraints: {binding}")]
    InfeasibleConstraints { binding: String },

    #[error("PDK has no entry for a {0}-port coupler")]
    MissingPdkEntry(usize),

    #[error("invalid PDK: {0}")]
    InvalidPdk(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
