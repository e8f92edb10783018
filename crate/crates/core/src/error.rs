use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value outside its admissible domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("weather series is empty")]
    EmptySeries,

    #[error("weather series is not a contiguous daily sequence: {prev} is followed by {next}")]
    NonContiguous {
        prev: chrono::NaiveDate,
        next: chrono::NaiveDate,
    },

    /// Malformed data row; `line` is 1-based and counts the header.
    #[error("line {line}: {message}")]
    Data { line: usize, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("numerical failure at t = {time:.4} d: {message}")]
    Numerical { time: f64, message: String },

    /// No day of the window admits the lower positive equilibrium.
    #[error("no day admits an E1 equilibrium ({0})")]
    NoLowerEquilibrium(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
