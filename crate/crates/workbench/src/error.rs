use formalpatch_core::Error as EngineError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{file}: {key}: {msg}")]
    Instance {
        file: String,
        key: String,
        msg: String,
    },
    #[error("{0}")]
    Engine(EngineError),
}

impl CliError {
    pub fn instance(source: &str, key: &str, msg: &str) -> CliError {
        CliError::Instance {
            file: source.to_string(),
            key: if key.is_empty() {
                "(root)".into()
            } else {
                key.to_string()
            },
            msg: msg.to_string(),
        }
    }

    /// An engine error raised while validating the value under `key`.
    pub fn engine_at(source: &str, key: &str, e: EngineError) -> CliError {
        match e {
            EngineError::Budget { .. } => CliError::Engine(e),
            other => CliError::instance(source, key, &other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Instance { .. } => 3,
            CliError::Engine(EngineError::Budget { .. }) => 4,
            CliError::Engine(_) => 3,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Engine(e)
    }
}
