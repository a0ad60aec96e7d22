use std::path::PathBuf;

/// Errors raised by state construction, channel construction and file export.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max entrywise deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("state is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("channel parameter p = {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("decay rate and time must be non-negative (gamma = {gamma}, t = {t})")]
    NegativeTime { gamma: f64, t: f64 },

    #[error(
        "Kraus operators are not complete (max deviation of sum K^dag K from I is {deviation:e})"
    )]
    IncompleteKraus { deviation: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: malformed field file: {reason}")]
    MalformedField { path: PathBuf, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
