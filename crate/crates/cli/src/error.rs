use thiserror::Error;

/// A bad configuration: unknown or inapplicable key, bad value, missing field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Runtime(_) => 3,
        }
    }
}

impl From<cmjtree::Error> for RunError {
    fn from(e: cmjtree::Error) -> Self {
        use cmjtree::Error::*;
        match e {
            InvalidArgument(_) | InvalidSpec(_) | TreeFormat { .. } => RunError::Config(ConfigError(e.to_string())),
            _ => RunError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Runtime(e.to_string())
    }
}
