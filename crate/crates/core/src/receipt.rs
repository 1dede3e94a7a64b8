//! Tool-execution receipts: minting, fact extraction and HMAC signing.
//!
//! A receipt is produced by the agent runtime for every tool call. The model
//! only ever sees receipt ids, never the signing key, so any receipt it
//! references either exists in the ledger with a valid tag or is fabricated.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hmac::{Hmac, Mac};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest as _, Sha256};
use uuid::Uuid;

use crate::canonical::{canonical_json, scalar_text};
use crate::clock::Clock;

type HmacSha256 = Hmac<Sha256>;

pub type Digest = [u8; 32];

/// Separator between signed fields. It cannot occur in hex digests, decimal
/// integers or hyphenated UUIDs, and tool names are checked not to contain it.
pub const FIELD_SEPARATOR: u8 = 0x1F;

pub const MIN_KEY_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KeyError {
    #[error("signing key must be at least {MIN_KEY_LEN} bytes, got {0}")]
    TooShort(usize),
    #[error("signing key is not valid hex")]
    InvalidHex,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReceiptError {
    #[error("tool name must be non-empty and must not contain the 0x1F separator")]
    InvalidToolName,
}

/// Session HMAC key. The bytes never appear in `Debug` output.
#[derive(Clone, PartialEq, Eq)]
pub struct SigningKey(Vec<u8>);

impl SigningKey {
    pub fn new(bytes: &[u8]) -> Result<Self, KeyError> {
        if bytes.len() < MIN_KEY_LEN {
            return Err(KeyError::TooShort(bytes.len()));
        }
        Ok(SigningKey(bytes.to_vec()))
    }

    pub fn from_hex(text: &str) -> Result<Self, KeyError> {
        let bytes = hex::decode(text.trim()).map_err(|_| KeyError::InvalidHex)?;
        Self::new(&bytes)
    }

    /// Short public identifier: the first 8 bytes of SHA-256(key), in hex.
    pub fn key_id(&self) -> String {
        let digest = Sha256::digest(&self.0);
        hex::encode(&digest[..8])
    }

    fn mac(&self) -> HmacSha256 {
        HmacSha256::new_from_slice(&self.0).expect("HMAC accepts keys of any length")
    }
}

impl fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigningKey({})", self.key_id())
    }
}

/// Signed record of one tool execution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolReceipt {
    pub id: Uuid,
    pub tool_name: String,
    #[serde(with = "hex_digest")]
    pub input_hash: Digest,
    #[serde(with = "hex_digest")]
    pub output_hash: Digest,
    pub result_count: u64,
    pub facts: BTreeMap<String, String>,
    pub timestamp_ms: i64,
    pub duration_ms: u64,
    #[serde(with = "hex_digest")]
    pub signature: Digest,
}

impl ToolReceipt {
    /// The exact bytes covered by the signature:
    /// `id|tool_name|input_hash|output_hash|result_count|facts_hash|timestamp_ms|duration_ms`
    /// with `|` being [`FIELD_SEPARATOR`] and digests in lowercase hex.
    pub fn signing_payload(&self) -> Vec<u8> {
        let facts_hash = facts_hash(&self.facts);
        let fields: [String; 8] = [
            self.id.hyphenated().to_string(),
            self.tool_name.clone(),
            hex::encode(self.input_hash),
            hex::encode(self.output_hash),
            self.result_count.to_string(),
            hex::encode(facts_hash),
            self.timestamp_ms.to_string(),
            self.duration_ms.to_string(),
        ];
        let mut out = Vec::with_capacity(256);
        for (i, field) in fields.iter().enumerate() {
            if i > 0 {
                out.push(FIELD_SEPARATOR);
            }
            out.extend_from_slice(field.as_bytes());
        }
        out
    }
}

fn facts_hash(facts: &BTreeMap<String, String>) -> Digest {
    let value = Value::Object(
        facts
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect(),
    );
    sha256(&canonical_json(&value))
}

pub fn sha256(bytes: &[u8]) -> Digest {
    Sha256::digest(bytes).into()
}

fn valid_tool_name(name: &str) -> bool {
    !name.is_empty() && !name.as_bytes().contains(&FIELD_SEPARATOR)
}

fn sign(payload: &[u8], key: &SigningKey) -> Digest {
    let mut mac = key.mac();
    mac.update(payload);
    mac.finalize().into_bytes().into()
}

/// Recomputes the tag over the receipt's signing payload and compares it in
/// constant time. A forged or altered receipt yields `false`.
pub fn verify_receipt_signature(receipt: &ToolReceipt, key: &SigningKey) -> bool {
    if !valid_tool_name(&receipt.tool_name) {
        return false;
    }
    let mut mac = key.mac();
    mac.update(&receipt.signing_payload());
    mac.verify_slice(&receipt.signature).is_ok()
}

/// Source of fresh receipt ids.
pub trait IdSource {
    fn next_id(&mut self) -> Uuid;
}

impl<F: FnMut() -> Uuid> IdSource for F {
    fn next_id(&mut self) -> Uuid {
        self()
    }
}

/// Deterministic v4-format ids from a seeded ChaCha stream.
pub struct SeededIds(ChaCha8Rng);

impl SeededIds {
    pub fn new(seed: u64) -> Self {
        SeededIds(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl IdSource for SeededIds {
    fn next_id(&mut self) -> Uuid {
        random_uuid(&mut self.0)
    }
}

pub(crate) fn random_uuid<R: RngCore>(rng: &mut R) -> Uuid {
    let mut bytes = [0u8; 16];
    rng.fill_bytes(&mut bytes);
    uuid::Builder::from_random_bytes(bytes).into_uuid()
}

/// One completed tool call as seen by the runtime.
#[derive(Debug, Clone, Copy)]
pub struct ToolExecution<'a> {
    pub tool_name: &'a str,
    pub input: &'a Value,
    pub raw_output: &'a [u8],
    pub output: &'a Value,
    pub duration_ms: u64,
}

/// Mints and signs a receipt for `exec`.
pub fn generate_receipt(
    exec: &ToolExecution<'_>,
    ids: &mut dyn IdSource,
    clock: &dyn Clock,
    key: &SigningKey,
    extractors: &FactExtractorConfig,
) -> Result<ToolReceipt, ReceiptError> {
    if !valid_tool_name(exec.tool_name) {
        return Err(ReceiptError::InvalidToolName);
    }
    let extraction = extract_facts(exec.tool_name, exec.input, exec.output, extractors);
    let mut receipt = ToolReceipt {
        id: ids.next_id(),
        tool_name: exec.tool_name.into(),
        input_hash: sha256(&canonical_json(exec.input)),
        output_hash: sha256(exec.raw_output),
        result_count: result_count(exec.output),
        facts: extraction.facts,
        timestamp_ms: clock.now_ms(),
        duration_ms: exec.duration_ms,
        signature: [0; 32],
    };
    receipt.signature = sign(&receipt.signing_payload(), key);
    Ok(receipt)
}

/// Number of result items in a structured tool output: the length of a
/// top-level `results` array, the length of a bare array, 0 for null or an
/// empty string/object, and 1 for any other scalar or object.
pub fn result_count(output: &Value) -> u64 {
    match output {
        Value::Object(map) => match map.get("results") {
            Some(Value::Array(items)) => items.len() as u64,
            _ if map.is_empty() => 0,
            _ => 1,
        },
        Value::Array(items) => items.len() as u64,
        Value::Null => 0,
        Value::String(s) if s.is_empty() => 0,
        _ => 1,
    }
}

// ---------------------------------------------------------------------------
// Fact extraction

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathRoot {
    Output,
    Input,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathSegment {
    Key(String),
    Index(usize),
}

/// Selector into a tool call, e.g. `results[0].sender` or `$input.url`.
/// Paths without a root, or rooted at `$`, select from the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactPath {
    pub root: PathRoot,
    pub segments: Vec<PathSegment>,
    source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid fact path {path:?}: {reason}")]
pub struct PathError {
    pub path: String,
    pub reason: &'static str,
}

impl FromStr for FactPath {
    type Err = PathError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason| PathError {
            path: text.into(),
            reason,
        };
        let trimmed = text.trim();
        let (root, mut rest) = if let Some(r) = trimmed.strip_prefix("$input") {
            (PathRoot::Input, r)
        } else if let Some(r) = trimmed.strip_prefix('$') {
            (PathRoot::Output, r)
        } else {
            (PathRoot::Output, trimmed)
        };
        let mut segments = Vec::new();
        let mut first = true;
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('[') {
                let close = r.find(']').ok_or_else(|| err("unclosed '['"))?;
                let idx = r[..close]
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| err("index must be a non-negative integer"))?;
                segments.push(PathSegment::Index(idx));
                rest = &r[close + 1..];
            } else {
                let r = match rest.strip_prefix('.') {
                    Some(r) => r,
                    None if first && root == PathRoot::Output && segments.is_empty() => rest,
                    None => return Err(err("expected '.' or '['")),
                };
                let end = r.find(['.', '[']).unwrap_or(r.len());
                let key = &r[..end];
                if key.is_empty() {
                    return Err(err("empty key"));
                }
                segments.push(PathSegment::Key(key.into()));
                rest = &r[end..];
            }
            first = false;
        }
        Ok(FactPath {
            root,
            segments,
            source: trimmed.into(),
        })
    }
}

impl fmt::Display for FactPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for FactPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for FactPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FactPath {
    fn resolve<'v>(&self, input: &'v Value, output: &'v Value) -> Option<&'v Value> {
        let mut cur = match self.root {
            PathRoot::Input => input,
            PathRoot::Output => output,
        };
        for seg in &self.segments {
            cur = match seg {
                PathSegment::Key(k) => cur.get(k.as_str())?,
                PathSegment::Index(i) => cur.get(*i)?,
            };
        }
        Some(cur)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactSelector {
    pub key: String,
    pub path: FactPath,
}

/// Per-tool fact selectors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactExtractorConfig {
    pub tools: BTreeMap<String, Vec<FactSelector>>,
}

impl FactExtractorConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Selectors for the tools used by the bundled scenarios.
    pub fn with_defaults() -> Self {
        let mut cfg = Self::default();
        cfg.insert(
            "email_search",
            &[
                ("sender", "results[0].sender"),
                ("subject", "results[0].subject"),
                ("date", "results[0].date"),
            ],
        );
        cfg.insert(
            "calendar_list",
            &[
                ("title", "results[0].title"),
                ("start", "results[0].start"),
                ("location", "results[0].location"),
            ],
        );
        cfg.insert(
            "stock_quote",
            &[
                ("symbol", "symbol"),
                ("close", "close"),
                ("change_pct", "change_pct"),
                ("date", "date"),
            ],
        );
        for tool in ["web_fetch", "http_get"] {
            cfg.insert(
                tool,
                &[
                    ("url", "$input.url"),
                    ("title", "title"),
                    ("publisher", "publisher"),
                    ("status", "status"),
                ],
            );
        }
        cfg
    }

    /// Replaces the selectors for `tool` (kept sorted by key). Panics on an invalid path literal;
    /// meant for static tables.
    pub fn insert(&mut self, tool: &str, selectors: &[(&str, &str)]) {
        let mut list: Vec<FactSelector> = selectors
            .iter()
            .map(|(k, p)| FactSelector {
                key: (*k).into(),
                path: p.parse().expect("static fact path"),
            })
            .collect();
        list.sort_by(|a, b| a.key.cmp(&b.key));
        self.tools.insert(tool.into(), list);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub facts: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

/// Applies the selectors configured for `tool_name`. Paths that are missing,
/// null or resolve to an array/object are skipped with a warning.
pub fn extract_facts(
    tool_name: &str,
    input: &Value,
    output: &Value,
    cfg: &FactExtractorConfig,
) -> Extraction {
    let mut out = Extraction::default();
    let Some(selectors) = cfg.tools.get(tool_name) else {
        out.warnings
            .push(format!("no fact extractor configured for tool {tool_name:?}"));
        return out;
    };
    for sel in selectors {
        match sel.path.resolve(input, output) {
            None => out
                .warnings
                .push(format!("{}: path {} not present", sel.key, sel.path)),
            Some(v) => match scalar_text(v) {
                Some(text) => {
                    out.facts.insert(sel.key.clone(), text);
                }
                None => out
                    .warnings
                    .push(format!("{}: path {} is not a scalar", sel.key, sel.path)),
            },
        }
    }
    out
}

mod hex_digest {
    use super::Digest;
    use alloc::string::String;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Digest, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(d))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Digest, D::Error> {
        let s = String::deserialize(d)?;
        let mut out = [0u8; 32];
        hex::decode_to_slice(s.as_bytes(), &mut out).map_err(serde::de::Error::custom)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FixedClock;
    use serde_json::json;

    fn key() -> SigningKey {
        SigningKey::new(&[7u8; 32]).unwrap()
    }

    #[test]
    fn short_key_rejected() {
        assert_eq!(SigningKey::new(&[0; 31]), Err(KeyError::TooShort(31)));
        assert!(SigningKey::from_hex("zz").is_err());
        assert!(SigningKey::from_hex(&"ab".repeat(32)).is_ok());
    }

    #[test]
    fn debug_hides_key_bytes() {
        let dbg = format!("{:?}", key());
        assert!(!dbg.contains("7, 7"));
    }

    #[test]
    fn result_count_rules() {
        assert_eq!(result_count(&json!({"results": [1, 2, 3]})), 3);
        assert_eq!(result_count(&json!({"results": []})), 0);
        assert_eq!(result_count(&json!({"symbol": "ACME"})), 1);
        assert_eq!(result_count(&json!([1, 2])), 2);
        assert_eq!(result_count(&json!(null)), 0);
        assert_eq!(result_count(&json!({})), 0);
        assert_eq!(result_count(&json!(42)), 1);
    }

    #[test]
    fn path_parsing() {
        let p: FactPath = "results[0].sender".parse().unwrap();
        assert_eq!(p.root, PathRoot::Output);
        assert_eq!(
            p.segments,
            vec![
                PathSegment::Key("results".into()),
                PathSegment::Index(0),
                PathSegment::Key("sender".into())
            ]
        );
        let p: FactPath = "$input.url".parse().unwrap();
        assert_eq!(p.root, PathRoot::Input);
        assert!("results[x]".parse::<FactPath>().is_err());
        assert!("a..b".parse::<FactPath>().is_err());
        assert!("$inputurl".parse::<FactPath>().is_err());
    }

    #[test]
    fn extraction_skips_non_scalars() {
        let cfg = {
            let mut c = FactExtractorConfig::empty();
            c.insert("t", &[("all", "results"), ("first", "results[0]"), ("n", "n")]);
            c
        };
        let ex = extract_facts("t", &json!({}), &json!({"results": [1], "n": 2.0}), &cfg);
        assert_eq!(ex.facts.len(), 2);
        assert_eq!(ex.facts["first"], "1");
        assert_eq!(ex.facts["n"], "2");
        assert_eq!(ex.warnings.len(), 1);

        let ex = extract_facts("unknown", &json!({}), &json!({}), &cfg);
        assert!(ex.facts.is_empty());
        assert_eq!(ex.warnings.len(), 1);
    }

    #[test]
    fn tool_name_with_separator_rejected() {
        let input = json!({});
        let exec = ToolExecution {
            tool_name: "bad\u{1f}name",
            input: &input,
            raw_output: b"",
            output: &input,
            duration_ms: 0,
        };
        let mut ids = SeededIds::new(1);
        let r = generate_receipt(&exec, &mut ids, &FixedClock(0), &key(), &FactExtractorConfig::empty());
        assert_eq!(r, Err(ReceiptError::InvalidToolName));
    }

    #[test]
    fn signature_round_trip_and_tamper() {
        let input = json!({"query": "from:Alice"});
        let output = json!({"results": [{"sender": "Alice", "subject": "Deadline update"}, {}, {}]});
        let raw = serde_json::to_vec(&output).unwrap();
        let exec = ToolExecution {
            tool_name: "email_search",
            input: &input,
            raw_output: &raw,
            output: &output,
            duration_ms: 150,
        };
        let cfg = FactExtractorConfig::with_defaults();
        let mut ids = SeededIds::new(3);
        let r = generate_receipt(&exec, &mut ids, &FixedClock(1_708_300_000_000), &key(), &cfg).unwrap();
        assert_eq!(r.result_count, 3);
        assert!(verify_receipt_signature(&r, &key()));
        let other = SigningKey::new(&[8u8; 32]).unwrap();
        assert!(!verify_receipt_signature(&r, &other));
        let mut t = r.clone();
        t.result_count = 5;
        assert!(!verify_receipt_signature(&t, &key()));
    }
}
