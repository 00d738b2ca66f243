use thiserror::Error;

/// Errors produced by the chain, solver, complexity and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid quench schedule: {0}")]
    InvalidSchedule(String),

    #[error("time {t} is outside the schedule range [0, {end})")]
    OutOfRange { t: f64, end: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A quantity that is positive for every valid input came out non-positive.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("oracle integration became unstable at t = {t} (mode {mode}, b = {b}); reduce the step")]
    Instability { t: f64, mode: usize, b: f64 },

    #[error("unsupported protocol: {0}")]
    Unsupported(String),

    #[error("time window violated: {0}")]
    Window(String),

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("config parse error: {0}")]
    ConfigSyntax(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
