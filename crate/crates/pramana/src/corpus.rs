//! Scenario corpora as JSON lines, one scenario per line.

use std::path::Path;

use pramana_core::bench::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
}

pub fn to_jsonl(scenarios: &[Scenario]) -> String {
    let mut out = String::new();
    for s in scenarios {
        out.push_str(&serde_json::to_string(s).expect("scenarios always serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_jsonl(text: &str) -> Result<Vec<Scenario>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| CorpusError::Parse { line: i + 1, source }))
        .collect()
}

pub fn write_corpus(path: &Path, scenarios: &[Scenario]) -> Result<(), CorpusError> {
    std::fs::write(path, to_jsonl(scenarios))
        .map_err(|source| CorpusError::Io { path: path.display().to_string(), source })
}

pub fn read_corpus(path: &Path) -> Result<Vec<Scenario>, CorpusError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    parse_jsonl(&text)
}
