//! Claims and the self-tagging verification block.
//!
//! A compliant response ends with a block such as
//!
//! ```text
//! ---VERIFICATION---
//! - claim: "Alice sent you 3 emails"
//!   source_type: tool_output
//!   evidence: 1b4e28ba-2fa1-11d2-883f-0016d3cca427
//!   checkable: true
//!   asserts: {"count": "3", "sender": "Alice"}
//! ---END VERIFICATION---
//! ```
//!
//! or a JSON array of objects with the same keys between the markers.
//! Anything else degrades to a single ungrounded claim covering the prose.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::canonical::scalar_text;
use crate::phrases::extract_urls;

pub const BLOCK_START: &str = "---VERIFICATION---";
pub const BLOCK_END: &str = "---END VERIFICATION---";

/// Epistemic source of a claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pramana {
    /// Direct tool output.
    Pratyaksha,
    /// Inference from tool data.
    Anumana,
    /// Comparison between two evidenced facts.
    Upamana,
    /// Testimony of an external, fetched source.
    Sabda,
    /// Absence: the tool returned nothing.
    Abhava,
    /// No evidence.
    Ungrounded,
}

impl Pramana {
    pub const ALL: [Pramana; 6] = [
        Pramana::Pratyaksha,
        Pramana::Anumana,
        Pramana::Upamana,
        Pramana::Sabda,
        Pramana::Abhava,
        Pramana::Ungrounded,
    ];

    /// Maps a wire token from the verification block. Unknown tokens and
    /// `opinion` are ungrounded.
    pub fn from_wire(token: &str) -> Pramana {
        match token.trim().to_ascii_lowercase().as_str() {
            "tool_output" => Pramana::Pratyaksha,
            "inference" => Pramana::Anumana,
            "comparison" => Pramana::Upamana,
            "external_source" => Pramana::Sabda,
            "absence" => Pramana::Abhava,
            _ => Pramana::Ungrounded,
        }
    }

    pub fn wire_token(self) -> &'static str {
        match self {
            Pramana::Pratyaksha => "tool_output",
            Pramana::Anumana => "inference",
            Pramana::Upamana => "comparison",
            Pramana::Sabda => "external_source",
            Pramana::Abhava => "absence",
            Pramana::Ungrounded => "opinion",
        }
    }

    /// Default confidence rank, higher is stronger. Testimony depends on the
    /// source and has no default.
    pub fn default_confidence(self) -> Option<u8> {
        match self {
            Pramana::Pratyaksha => Some(4),
            Pramana::Anumana | Pramana::Abhava => Some(3),
            Pramana::Upamana => Some(2),
            Pramana::Sabda => None,
            Pramana::Ungrounded => Some(0),
        }
    }
}

/// One tagged factual claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub text: String,
    pub source_type: Pramana,
    pub evidence: Option<String>,
    pub checkable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asserts: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premises: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cited_urls: Vec<String>,
}

impl Claim {
    /// The fallback claim for responses without a usable block.
    pub fn ungrounded(text: &str) -> Claim {
        Claim {
            text: text.into(),
            source_type: Pramana::Ungrounded,
            evidence: None,
            checkable: false,
            asserts: None,
            premises: None,
            cited_urls: extract_urls(text),
        }
    }

    pub fn assert_value(&self, key: &str) -> Option<&str> {
        self.asserts.as_ref()?.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub prose: String,
    pub claims: Vec<Claim>,
    pub compliant: bool,
}

/// Splits a response into prose and claims. Never fails: a missing or
/// malformed block yields `compliant = false` and one ungrounded claim.
pub fn parse_verification_block(response: &str) -> ParsedResponse {
    let (prose, blocks) = split_blocks(response);
    let parsed = blocks.last().and_then(|body| {
        let trimmed = body.trim();
        if trimmed.starts_with('[') {
            parse_json_entries(trimmed)
        } else {
            parse_dash_entries(body)
        }
    });
    match parsed {
        Some(raw) => ParsedResponse {
            prose,
            claims: raw.into_iter().map(RawEntry::into_claim).collect(),
            compliant: true,
        },
        None => ParsedResponse {
            claims: alloc::vec![Claim::ungrounded(&prose)],
            prose,
            compliant: false,
        },
    }
}

/// Returns the prose with every complete block removed, and the bodies of
/// those blocks in order.
fn split_blocks(response: &str) -> (String, Vec<&str>) {
    let mut prose = String::with_capacity(response.len());
    let mut blocks = Vec::new();
    let mut open: Option<(usize, usize)> = None; // (marker line start, body start)
    let mut kept_from = 0;
    let mut offset = 0;
    for line in response.split_inclusive('\n') {
        let t = line.trim();
        match open {
            None if t == BLOCK_START => open = Some((offset, offset + line.len())),
            Some((_, body_start)) if t == BLOCK_START => {
                // Restart at the newer marker; the earlier one was never closed.
                let _ = body_start;
                open = Some((offset, offset + line.len()));
            }
            Some((marker, body_start)) if t == BLOCK_END => {
                prose.push_str(&response[kept_from..marker]);
                blocks.push(&response[body_start..offset]);
                kept_from = offset + line.len();
                open = None;
            }
            _ => {}
        }
        offset += line.len();
    }
    prose.push_str(&response[kept_from..]);
    (prose.trim().into(), blocks)
}

#[derive(Default)]
struct RawEntry {
    claim: Option<String>,
    source_type: Option<String>,
    evidence: Option<String>,
    checkable: Option<bool>,
    asserts: Option<BTreeMap<String, String>>,
    premises: Option<Vec<String>>,
}

impl RawEntry {
    fn into_claim(self) -> Claim {
        let text = self.claim.unwrap_or_default();
        let source_type = self
            .source_type
            .as_deref()
            .map_or(Pramana::Ungrounded, Pramana::from_wire);
        let checkable = source_type != Pramana::Ungrounded && self.checkable.unwrap_or(true);
        let mut cited_urls = extract_urls(&text);
        if let Some(a) = &self.asserts {
            for key in ["source", "url"] {
                if let Some(v) = a.get(key) {
                    for u in extract_urls(v) {
                        if !cited_urls.contains(&u) {
                            cited_urls.push(u);
                        }
                    }
                }
            }
        }
        Claim {
            text,
            source_type,
            evidence: self.evidence,
            checkable,
            asserts: self.asserts,
            premises: self.premises,
            cited_urls,
        }
    }
}

fn clean_evidence(raw: &str) -> Option<String> {
    let v = unquote(raw);
    match v.to_ascii_lowercase().as_str() {
        "" | "none" | "null" | "n/a" | "-" => None,
        _ => Some(v),
    }
}

fn unquote(raw: &str) -> String {
    let t = raw.trim();
    if t.len() >= 2 && t.starts_with('"') && t.ends_with('"') {
        if let Ok(s) = serde_json::from_str::<String>(t) {
            return s;
        }
        return t[1..t.len() - 1].into();
    }
    if t.len() >= 2 && t.starts_with('\'') && t.ends_with('\'') {
        return t[1..t.len() - 1].into();
    }
    t.into()
}

fn parse_bool(raw: &str) -> Option<bool> {
    match unquote(raw).to_ascii_lowercase().as_str() {
        "true" | "yes" => Some(true),
        "false" | "no" => Some(false),
        _ => None,
    }
}

fn asserts_from_value(v: &Value) -> Option<BTreeMap<String, String>> {
    let obj = v.as_object()?;
    obj.iter()
        .map(|(k, v)| scalar_text(v).map(|s| (k.clone(), s)))
        .collect()
}

fn premises_from_value(v: &Value) -> Option<Vec<String>> {
    v.as_array()?.iter().map(scalar_text).collect()
}

fn parse_premises_text(raw: &str) -> Option<Vec<String>> {
    let t = raw.trim();
    if t.starts_with('[') {
        return premises_from_value(&serde_json::from_str(t).ok()?);
    }
    Some(
        t.split(',')
            .map(unquote)
            .filter(|s| !s.is_empty())
            .collect(),
    )
}

/// Applies one `key: value` field. `None` means the block is malformed.
fn apply_field(entry: &mut RawEntry, key: &str, value: &str) -> Option<()> {
    match key.trim().to_ascii_lowercase().as_str() {
        "claim" => entry.claim = Some(unquote(value)),
        "source_type" => entry.source_type = Some(unquote(value)),
        "evidence" => entry.evidence = clean_evidence(value),
        "checkable" => entry.checkable = Some(parse_bool(value)?),
        "asserts" => entry.asserts = Some(asserts_from_value(&serde_json::from_str(value.trim()).ok()?)?),
        "premises" => entry.premises = Some(parse_premises_text(value)?),
        // Unknown fields are tolerated.
        _ => {}
    }
    Some(())
}

fn parse_dash_entries(body: &str) -> Option<Vec<RawEntry>> {
    let mut entries: Vec<RawEntry> = Vec::new();
    for line in body.lines() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let (dashed, field) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, t),
        };
        let (key, value) = field.split_once(':')?;
        let is_claim = key.trim().eq_ignore_ascii_case("claim");
        if dashed && is_claim {
            entries.push(RawEntry::default());
        } else if entries.is_empty() {
            return None;
        }
        let current = entries.last_mut()?;
        if dashed && !is_claim && field_already_set(current, key) {
            return None;
        }
        apply_field(current, key, value)?;
    }
    if entries.iter().any(|e| e.claim.as_deref().is_none_or(str::is_empty)) {
        return None;
    }
    Some(entries)
}

fn field_already_set(entry: &RawEntry, key: &str) -> bool {
    match key.trim().to_ascii_lowercase().as_str() {
        "source_type" => entry.source_type.is_some(),
        "evidence" => entry.evidence.is_some(),
        "checkable" => entry.checkable.is_some(),
        _ => false,
    }
}

fn parse_json_entries(body: &str) -> Option<Vec<RawEntry>> {
    let value: Value = serde_json::from_str(body).ok()?;
    value
        .as_array()?
        .iter()
        .map(|item| {
            let obj = item.as_object()?;
            let text = obj.get("claim")?.as_str()?;
            if text.trim().is_empty() {
                return None;
            }
            let mut e = RawEntry {
                claim: Some(text.into()),
                ..RawEntry::default()
            };
            if let Some(v) = obj.get("source_type") {
                e.source_type = Some(v.as_str()?.into());
            }
            match obj.get("evidence") {
                None | Some(Value::Null) => {}
                Some(v) => e.evidence = clean_evidence(&scalar_text(v)?),
            }
            match obj.get("checkable") {
                None | Some(Value::Null) => {}
                Some(Value::Bool(b)) => e.checkable = Some(*b),
                Some(v) => e.checkable = Some(parse_bool(&v.to_string())?),
            }
            if let Some(v) = obj.get("asserts").filter(|v| !v.is_null()) {
                e.asserts = Some(asserts_from_value(v)?);
            }
            if let Some(v) = obj.get("premises").filter(|v| !v.is_null()) {
                e.premises = Some(premises_from_value(v)?);
            }
            Some(e)
        })
        .collect()
}
