use serde::Serialize;
use thiserror::Error;

/// Failures reported as a JSON object on standard error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config{}: {message}", field.as_ref().map(|f| format!(" ({f})")).unwrap_or_default())]
    Config {
        field: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Numerical(#[from] volcano_core::Error),

    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(field: Option<&str>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.map(str::to_string),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: &'a str,
            field: Option<&'a str>,
            message: String,
            exit_code: u8,
        }
        let (kind, field) = match self {
            CliError::Config { field, .. } => ("invalid_config", field.as_deref()),
            CliError::Numerical(_) => ("numerical", None),
            CliError::Io(_) => ("io", None),
        };
        let message = match self {
            CliError::Config { message, .. } => message.clone(),
            other => other.to_string(),
        };
        serde_json::to_string(&Report {
            error: kind,
            field,
            message,
            exit_code: self.exit_code(),
        })
        .expect("error report serializes")
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
