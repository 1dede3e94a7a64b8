use pramana_core::receipt::{sha256, KeyError};
use pramana_core::SigningKey;

/// Environment variable read when no `--key-env` is given.
pub const DEFAULT_KEY_ENV: &str = "PRAMANA_RECEIPT_KEY";

#[derive(Debug, thiserror::Error)]
pub enum KeyLoadError {
    #[error("signing key variable {0} is not set")]
    Missing(String),
    #[error("signing key in {var} must be 64 hex characters, got {len}")]
    WrongLength { var: String, len: usize },
    #[error("signing key in {var}: {source}")]
    Invalid { var: String, source: KeyError },
}

/// Parses a 32-byte key written as 64 hex characters.
pub fn parse_key(var: &str, text: &str) -> Result<SigningKey, KeyLoadError> {
    let text = text.trim();
    if text.len() != 64 {
        return Err(KeyLoadError::WrongLength { var: var.into(), len: text.len() });
    }
    SigningKey::from_hex(text).map_err(|source| KeyLoadError::Invalid { var: var.into(), source })
}

pub fn key_from_env(var: &str) -> Result<SigningKey, KeyLoadError> {
    match std::env::var(var) {
        Ok(v) => parse_key(var, &v),
        Err(_) => Err(KeyLoadError::Missing(var.into())),
    }
}

/// Session key for benchmark runs, derived from the seed so corpora can be
/// re-scored without any external secret.
pub fn bench_key(seed: u64) -> SigningKey {
    let mut material = b"pramana-bench-key:".to_vec();
    material.extend_from_slice(&seed.to_le_bytes());
    SigningKey::new(&sha256(&material)).expect("digest is 32 bytes")
}
