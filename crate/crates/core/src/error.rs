use thiserror::Error;

/// Errors raised by state construction, quantity evaluation and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("label `{0}` appears more than once")]
    LabelCollision(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("argument outside its domain: {0}")]
    Domain(String),
    #[error("outcome count {outcomes} outside [{min}, {max}]")]
    OutcomeBudget { outcomes: usize, min: usize, max: usize },
    #[error("ensemble size {size} outside [{min}, {max}]")]
    EnsembleBudget { size: usize, min: usize, max: usize },
    #[error("ancilla split {split:?} cannot hold rank {rank}")]
    SplitBudget { split: (usize, usize), rank: usize },
    #[error("route unavailable: {0}")]
    RouteUnavailable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        if err.is_io() {
            Error::Io(err.into())
        } else {
            Error::Parse(err.to_string())
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    }
}
