//! Append-only session store of receipts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use uuid::Uuid;

use crate::receipt::ToolReceipt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    #[error("receipt {0} is already in the ledger")]
    DuplicateId(Uuid),
    #[error("malformed receipt id {0:?}")]
    MalformedId(String),
}

#[derive(Debug, Clone, Default)]
pub struct Ledger {
    entries: Vec<ToolReceipt>,
    index: BTreeMap<Uuid, usize>,
    key_id: String,
}

impl Ledger {
    pub fn new(key_id: impl Into<String>) -> Self {
        Ledger {
            entries: Vec::new(),
            index: BTreeMap::new(),
            key_id: key_id.into(),
        }
    }

    pub fn key_id(&self) -> &str {
        &self.key_id
    }

    /// Appends a receipt. Existing entries are never touched.
    pub fn append(&mut self, receipt: ToolReceipt) -> Result<(), LedgerError> {
        if self.index.contains_key(&receipt.id) {
            return Err(LedgerError::DuplicateId(receipt.id));
        }
        self.index.insert(receipt.id, self.entries.len());
        self.entries.push(receipt);
        Ok(())
    }

    /// Looks up a receipt by its textual id. `Ok(None)` means the id is
    /// well-formed but was never issued.
    pub fn lookup(&self, id: &str) -> Result<Option<&ToolReceipt>, LedgerError> {
        let uuid = Uuid::parse_str(id.trim()).map_err(|_| LedgerError::MalformedId(id.into()))?;
        Ok(self.get(&uuid))
    }

    pub fn get(&self, id: &Uuid) -> Option<&ToolReceipt> {
        self.index.get(id).map(|&i| &self.entries[i])
    }

    /// Receipts in insertion order.
    pub fn entries(&self) -> &[ToolReceipt] {
        &self.entries
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ToolReceipt> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<'a> IntoIterator for &'a Ledger {
    type Item = &'a ToolReceipt;
    type IntoIter = core::slice::Iter<'a, ToolReceipt>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn receipt(id: Uuid) -> ToolReceipt {
        ToolReceipt {
            id,
            tool_name: "t".into(),
            input_hash: [0; 32],
            output_hash: [0; 32],
            result_count: 0,
            facts: BTreeMap::new(),
            timestamp_ms: 0,
            duration_ms: 0,
            signature: [0; 32],
        }
    }

    #[test]
    fn append_and_lookup() {
        let mut l = Ledger::new("k");
        let id = Uuid::from_u128(1);
        l.append(receipt(id)).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.lookup(&id.to_string()).unwrap().unwrap().id, id);
        assert_eq!(l.append(receipt(id)), Err(LedgerError::DuplicateId(id)));
        assert_eq!(l.len(), 1);
    }

    #[test]
    fn absent_is_not_an_error() {
        let l = Ledger::new("k");
        assert_eq!(l.lookup("1b4e28ba-2fa1-11d2-883f-0016d3cca427"), Ok(None));
        assert!(matches!(l.lookup("not-a-uuid"), Err(LedgerError::MalformedId(_))));
    }
}
