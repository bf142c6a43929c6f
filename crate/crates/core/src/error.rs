use std::path::PathBuf;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty reference")]
    EmptyReference,

    #[error("empty input sentence")]
    EmptyInput,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("value {value} for {what} is outside [0, 1]")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no candidates")]
    NoCandidates,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite loss at step {step}")]
    Divergence { step: usize },

    #[error("degenerate sample")]
    DegenerateSample,

    #[error("missing auditor rating for disagreeing raters ({0} vs {1})")]
    MissingAuditor(u8, u8),

    #[error("auditor rating given although raters agree ({0})")]
    SpuriousAuditor(u8),

    #[error("rating {0} outside 0..=5")]
    InvalidRating(i64),

    #[error("insufficient stratum population: {0}")]
    InsufficientStratum(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Divergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
