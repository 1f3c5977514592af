use std::path::PathBuf;

use docgen_core::{GenerateError, GenerationConstraints, LoadError};

/// Environment variable that replaces the configured bank path.
pub const BANK_PATH_ENV: &str = "DOCGEN_BANK_PATH";

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub bank_path: PathBuf,
    pub listen_address: String,
    pub media_root: Option<PathBuf>,
    pub session_dir: PathBuf,
    pub constraints: GenerationConstraints,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot load clip bank: {0}")]
    Bank(#[from] LoadError),
    #[error("{0}")]
    Constraints(GenerateError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ServiceConfig {
    pub fn new(bank_path: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            bank_path: bank_path.into(),
            listen_address: "127.0.0.1:8080".into(),
            media_root: None,
            session_dir: PathBuf::from("sessions"),
            constraints: GenerationConstraints::default(),
        }
    }

    /// Applies `DOCGEN_BANK_PATH` when it is set and non-empty.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(path) = std::env::var_os(BANK_PATH_ENV).filter(|p| !p.is_empty()) {
            self.bank_path = path.into();
        }
        self
    }
}
