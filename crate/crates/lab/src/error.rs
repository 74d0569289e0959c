use std::path::PathBuf;

/// Top-level failure of a lab run; each variant maps to a distinct exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error("solver error: {0}")]
    Solver(#[from] ident_core::Error),

    #[error("check failed: {0}")]
    Check(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Solver(_) => 3,
            LabError::Check(_) => 4,
            LabError::Io { .. } => 1,
        }
    }
}

/// A config problem, tied to the offending field when there is one.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Unreadable { path: String, message: String },

    #[error("malformed config file {path}: {message}")]
    Malformed { path: String, message: String },

    #[error("field `{field}` is required for `{command}`")]
    Missing { field: &'static str, command: String },

    #[error("field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

impl ConfigError {
    pub fn field(&self) -> Option<&'static str> {
        match self {
            ConfigError::Missing { field, .. } | ConfigError::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}
