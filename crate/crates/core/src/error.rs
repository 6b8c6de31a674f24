use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision exhausted: {requested} bits requested, cap is {cap}")]
    PrecisionExhausted { requested: usize, cap: usize },
    #[error("floor undecidable at {cap} bits: enclosure straddles {straddled}")]
    FloorUndecidable { straddled: i64, cap: usize },
    #[error("range error: {0}")]
    Range(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("parameter error: {}", violations.join("; "))]
    Param { violations: Vec<String> },
    #[error("classification failure: {0}")]
    Classification(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
