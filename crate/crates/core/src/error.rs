use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates one of the scenario or experiment invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("position {value} for AP {ap} is outside 1..={max}")]
    PlacementOutOfRange { ap: usize, value: usize, max: usize },

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("search space of {space} placements exceeds the budget cap of {cap}")]
    BudgetExceeded { space: f64, cap: u64 },

    #[error("experience pool holds {have} transitions, update needs {need}")]
    InsufficientPool { have: usize, need: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("snapshot {path:?}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error("sweep point {point} ({label}): {source}")]
    SweepPoint {
        point: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short category tag used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "validation",
            Error::Parse { .. } | Error::UnknownKey { .. } => "config",
            Error::Dimension { .. }
            | Error::PlacementOutOfRange { .. }
            | Error::IndexOutOfRange { .. }
            | Error::EmptyInput(_) => "input",
            Error::BudgetExceeded { .. } => "budget",
            Error::InsufficientPool { .. } => "training",
            Error::Snapshot { .. } | Error::Io(_) | Error::Csv(_) => "io",
            Error::SweepPoint { source, .. } => source.category(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "validation" => 3,
            "budget" => 4,
            "io" => 5,
            "input" => 6,
            _ => 1,
        }
    }
}
