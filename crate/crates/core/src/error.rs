use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("statement {statement}: unknown alternative `{label}`")]
    UnknownAlternative { statement: usize, label: String },

    #[error("statement {statement}: unknown criterion `{name}`")]
    UnknownCriterion { statement: usize, name: String },

    #[error("statement {statement}: {message}")]
    Statement { statement: usize, message: String },

    #[error("{n} criteria exceed the enumeration cap of {cap}")]
    CapacityExceeded { n: usize, cap: usize },

    #[error("constraint system is infeasible (max epsilon {epsilon})")]
    Infeasible { epsilon: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("sampler: {0}")]
    Sampler(String),

    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
