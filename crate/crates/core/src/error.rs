use thiserror::Error;

/// Errors raised by grid operations, flows and audits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Mass would leave the computational interval.
    #[error("truncation: {0}")]
    Truncation(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("degenerate support: {found} samples qualify, at least {needed} required")]
    DegenerateSupport { found: usize, needed: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A failure inside a time sweep, tagged with the offending time point.
    #[error("at time index {index} (t = {time}): {source}")]
    AtTime {
        index: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Strips `AtTime` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn at_time(self, index: usize, time: f64) -> Error {
        Error::AtTime {
            index,
            time,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
