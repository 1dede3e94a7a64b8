//! Deterministic JSON serialization used for hashing.
//!
//! Rules: object keys sorted by their UTF-8 bytes, no insignificant
//! whitespace, integers (including integral floats) without a fraction, other
//! numbers in shortest round-trip decimal form, and only the mandatory string
//! escapes.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde_json::{Number, Value};

#[derive(Debug, thiserror::Error)]
pub enum CanonicalError {
    #[error("invalid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("non-finite number")]
    NonFinite,
}

/// Canonical bytes of a parsed JSON value.
///
/// `serde_json::Value` cannot hold NaN or infinities, so this cannot fail;
/// use [`canonicalize_text`] when starting from raw text.
pub fn canonical_json(value: &Value) -> Vec<u8> {
    let mut out = String::new();
    write_value(&mut out, value);
    out.into_bytes()
}

/// Parses JSON text and returns its canonical bytes. Out-of-range numbers
/// such as `1e999` are rejected rather than saturated.
pub fn canonicalize_text(text: &str) -> Result<Vec<u8>, CanonicalError> {
    let value: Value = serde_json::from_str(text)?;
    Ok(canonical_json(&value))
}

/// Renders a scalar the way it appears inside canonical JSON, but without
/// quotes around strings. Returns `None` for arrays, objects and null.
pub fn scalar_text(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(if *b { "true".into() } else { "false".into() }),
        Value::Number(n) => {
            let mut s = String::new();
            write_number(&mut s, n);
            Some(s)
        }
        _ => None,
    }
}

fn write_value(out: &mut String, value: &Value) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(true) => out.push_str("true"),
        Value::Bool(false) => out.push_str("false"),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => write_string(out, s),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
            out.push('{');
            for (i, (k, v)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_string(out, k);
                out.push(':');
                write_value(out, v);
            }
            out.push('}');
        }
    }
}

fn write_number(out: &mut String, n: &Number) {
    if let Some(u) = n.as_u64() {
        let _ = write!(out, "{u}");
    } else if let Some(i) = n.as_i64() {
        let _ = write!(out, "{i}");
    } else {
        let f = n.as_f64().unwrap_or(0.0);
        // Display for f64 is the shortest round-trip form and never uses an
        // exponent; integral values print without a fraction.
        if f == 0.0 {
            out.push('0');
        } else {
            let _ = write!(out, "{f}");
        }
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\u{08}' => out.push_str("\\b"),
            '\u{0C}' => out.push_str("\\f"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
