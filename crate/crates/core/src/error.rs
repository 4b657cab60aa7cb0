use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Variants are grouped by how a caller is expected to react: bad
/// configuration, bad input data, or a numerically degenerate problem.
/// [`Error::exit_code`] maps these groups onto the CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    /// A series whose detrended variance vanishes at every box, or a
    /// constant row where a standardized one is required.
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Prefix the message with `ctx`, keeping the error class.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
            Error::Data(m) => Error::Data(format!("{ctx}: {m}")),
            Error::DegenerateSeries(m) => Error::DegenerateSeries(format!("{ctx}: {m}")),
            Error::DegenerateCovariance(m) => Error::DegenerateCovariance(format!("{ctx}: {m}")),
            Error::Numerical(m) => Error::Numerical(format!("{ctx}: {m}")),
            Error::Csv(e) => Error::Data(format!("{ctx}: {e}")),
            Error::Json(e) => Error::Data(format!("{ctx}: {e}")),
            io @ Error::Io { .. } => io,
        }
    }

    /// Process exit code: 2 config, 3 data (including I/O), 4 numerical degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Io { .. } | Error::Csv(_) | Error::Json(_) => 3,
            Error::DegenerateSeries(_) | Error::DegenerateCovariance(_) | Error::Numerical(_) => 4,
        }
    }
}

macro_rules! config_err {
    ($($arg:tt)*) => { $crate::error::Error::Config(format!($($arg)*)) };
}

macro_rules! data_err {
    ($($arg:tt)*) => { $crate::error::Error::Data(format!($($arg)*)) };
}

pub(crate) use config_err;
pub(crate) use data_err;
