use thiserror::Error;

/// Exit status: the analysis ran but found no dark state.
pub const EXIT_NO_DARK_STATE: i32 = 1;
/// Exit status for input, schema and validation errors.
pub const EXIT_INPUT: i32 = 2;
/// Exit status for numerical failures on valid input.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Schema(_) => "SchemaError",
            CliError::Validation(_) => "ValidationError",
            CliError::Usage(_) => "UsageError",
            CliError::Io(_) => "IoError",
            CliError::Numerical(_) => "NumericalError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }

    /// One-line JSON diagnostic for the error stream.
    pub fn diagnostic(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}
