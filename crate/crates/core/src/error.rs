use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("row {row} does not match any support point")]
    UnknownSupportPoint { row: usize },
    #[error("sample is empty")]
    EmptySample,
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("problem needs {required} tensor entries, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("solver failure: {reason} (iterations: {iterations}, rows: {rows})")]
    SolverFailure {
        reason: String,
        iterations: usize,
        rows: usize,
    },
    #[error("row generation exceeded the cap of {cap} rows")]
    RowCapExceeded { cap: usize },
    #[error("measures do not share one support")]
    SupportMismatch,
    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("duplicate support point at position {0}")]
    DuplicateSupportPoint(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("k = {k} is not divisible by the number of clusters {clusters}")]
    DivisibilityViolation { k: usize, clusters: usize },
    #[error("dual entry {0} is unbounded")]
    UnboundedEntry(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that come from a solver rather than from the inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::SolverFailure { .. } | Error::RowCapExceeded { .. } | Error::UnboundedEntry(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownSupportPoint { .. } => "UnknownSupportPoint",
            Error::EmptySample => "EmptySample",
            Error::InvalidSize(_) => "InvalidSize",
            Error::InvalidInput(_) => "InvalidInput",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::SolverFailure { .. } => "SolverFailure",
            Error::RowCapExceeded { .. } => "RowCapExceeded",
            Error::SupportMismatch => "SupportMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DuplicateSupportPoint(_) => "DuplicateSupportPoint",
            Error::Parse { .. } => "ParseError",
            Error::DivisibilityViolation { .. } => "DivisibilityViolation",
            Error::UnboundedEntry(_) => "UnboundedEntry",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
