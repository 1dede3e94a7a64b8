//! JSON-lines ledger files: one receipt per line, digests and signature in
//! lowercase hex. The signing key never appears in the file.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use pramana_core::ledger::LedgerError;
use pramana_core::{Ledger, ToolReceipt};

#[derive(Debug, thiserror::Error)]
pub enum LedgerFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("line {line}: {source}")]
    Duplicate { line: usize, source: LedgerError },
}

pub fn parse_ledger(text: &str, key_id: &str) -> Result<Ledger, LedgerFileError> {
    parse_lines(text.lines().map(|l| Ok(l.to_string())), key_id, "<text>")
}

pub fn read_ledger(path: &Path, key_id: &str) -> Result<Ledger, LedgerFileError> {
    let io_err = |source| LedgerFileError::Io { path: path.display().to_string(), source };
    let file = File::open(path).map_err(io_err)?;
    parse_lines(BufReader::new(file).lines(), key_id, &path.display().to_string())
}

fn parse_lines(
    lines: impl Iterator<Item = io::Result<String>>,
    key_id: &str,
    path: &str,
) -> Result<Ledger, LedgerFileError> {
    let mut ledger = Ledger::new(key_id);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|source| LedgerFileError::Io { path: path.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let receipt: ToolReceipt =
            serde_json::from_str(&line).map_err(|source| LedgerFileError::Parse { line: i + 1, source })?;
        ledger
            .append(receipt)
            .map_err(|source| LedgerFileError::Duplicate { line: i + 1, source })?;
    }
    Ok(ledger)
}

pub fn receipt_line(r: &ToolReceipt) -> String {
    let mut s = serde_json::to_string(r).expect("receipts always serialize");
    s.push('\n');
    s
}

/// Appends one receipt as a single write so concurrent appenders do not
/// interleave partial lines.
pub fn append_receipt(path: &Path, r: &ToolReceipt) -> io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(receipt_line(r).as_bytes())
}

pub fn write_ledger(path: &Path, ledger: &Ledger) -> io::Result<()> {
    let text: String = ledger.iter().map(receipt_line).collect();
    std::fs::write(path, text)
}
