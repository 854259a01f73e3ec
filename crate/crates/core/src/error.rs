use std::path::PathBuf;

/// Errors raised while loading facts or computing metrics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown field `{path}` (pass --lenient to ignore unknown fields)")]
    UnknownField { path: String },

    #[error("{context}: unknown class `{id}`")]
    ReferentialIntegrity { id: String, context: String },

    #[error("class `{class}` has no module in scheme `{scheme}`")]
    Completeness { class: String, scheme: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{kind} `{name}` not found")]
    NotFound { kind: &'static str, name: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn not_found(kind: &'static str, name: impl Into<String>) -> Self {
        Error::NotFound {
            kind,
            name: name.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
