use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested target can never be met (e.g. a DC target at or above
    /// rectifier saturation).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Exhaustive search was asked for more cells than the configured cap.
    #[error("exhaustive search refused: {cells} cells exceeds the cap of {cap} (2^{cells} - 2 combinations)")]
    BruteForceCap { cells: usize, cap: usize, combinations: u128 },

    /// Fewer than two configurations were recorded, so no reconfiguration
    /// interval exists.
    #[error("undefined reconfiguration cadence: {0}")]
    UndefinedCadence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

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
