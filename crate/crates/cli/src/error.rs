use serde::Serialize;

/// Failure reported on stderr as one JSON object.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// The configuration is malformed or inconsistent.
    Config,
    Io,
    Runtime,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Io,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Runtime,
            message: message.into(),
        }
    }

    /// Errors while building datasets and keys from the config are
    /// configuration errors.
    pub fn from_setup(e: cbleak_core::Error) -> Self {
        match e {
            cbleak_core::Error::Io(e) => Self::io(e.to_string()),
            other => Self::config(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Io => 3,
            ErrorKind::Runtime => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl From<cbleak_core::Error> for CliError {
    fn from(e: cbleak_core::Error) -> Self {
        match e {
            cbleak_core::Error::Io(e) => Self::io(e.to_string()),
            other => Self::runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::runtime(e.to_string())
    }
}
