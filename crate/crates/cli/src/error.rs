use gridcast_core::{ErrorClass, ForecastError};
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Core(ForecastError),
}

impl From<ForecastError> for CliError {
    fn from(e: ForecastError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error on {}: {e}", path.display()))
    }

    fn class(&self) -> (&'static str, i32) {
        match self {
            CliError::Usage(_) => ("usage", 2),
            CliError::Data(_) => ("data", 3),
            CliError::Core(e) => match e.class() {
                ErrorClass::Usage => ("usage", 2),
                ErrorClass::Data => ("data", 3),
                ErrorClass::Divergence => ("divergence", 4),
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().1
    }

    /// One-line JSON object for stderr.
    pub fn to_line(&self) -> String {
        let (kind, code) = self.class();
        let message = match self {
            CliError::Usage(m) | CliError::Data(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        };
        let message = message.split_whitespace().collect::<Vec<_>>().join(" ");
        json!({ "error": kind, "code": code, "message": message }).to_string()
    }
}
