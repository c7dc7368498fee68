use std::fmt;

/// Failure classes of a CLI invocation, each with its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed scenario text; `line` is 1-based when known.
    Parse {
        line: Option<usize>,
        message: String,
    },
    /// A well-formed value that violates an invariant.
    Validation {
        field: String,
        invariant: String,
    },
    Io(std::io::Error),
    Numerical(coherent_core::Error),
}

impl CliError {
    pub fn validation(field: impl Into<String>, invariant: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            invariant: invariant.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse {
                line: Some(line),
                message,
            } => write!(f, "parse error at line {line}: {message}"),
            CliError::Parse { line: None, message } => write!(f, "parse error: {message}"),
            CliError::Validation { field, invariant } => write!(f, "invalid {field}: {invariant}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<coherent_core::Error> for CliError {
    fn from(e: coherent_core::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}
