//! Constitution files in TOML.

use std::path::Path;

use pramana_core::policy::{ConstitutionError, RawConstitution};
use pramana_core::Constitution;

/// Commented example covering every section.
pub const EXAMPLE: &str = include_str!("../constitution.example.toml");

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("TOML syntax: {0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Invalid(#[from] ConstitutionError),
}

impl LoadError {
    /// Dotted path of the offending field, when known.
    pub fn field(&self) -> Option<&str> {
        match self {
            LoadError::Field { field, .. } => Some(field),
            LoadError::Invalid(e) => Some(&e.field),
            _ => None,
        }
    }
}

/// Parses and validates a constitution. An empty document yields the
/// standard-mode defaults.
pub fn load_constitution(text: &str) -> Result<Constitution, LoadError> {
    let de = toml::Deserializer::parse(text).map_err(|e| LoadError::Syntax(e.to_string()))?;
    let raw: RawConstitution = serde_path_to_error::deserialize(de).map_err(|e| LoadError::Field {
        field: e.path().to_string(),
        message: e.inner().message().to_string(),
    })?;
    Ok(Constitution::from_raw(raw)?)
}

pub fn read_constitution(path: &Path) -> Result<Constitution, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    load_constitution(&text)
}

/// Full TOML form; loading it gives back an equal constitution.
pub fn to_toml(c: &Constitution) -> String {
    toml::to_string_pretty(&c.to_raw()).expect("constitution always serializes")
}
