//! Output-regex baseline: compares response text with raw tool output text
//! without receipts or self-tags.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::claim::BLOCK_START;
use crate::engine::{Verdict, VerdictKind};
use crate::phrases::{count_mentions, detect_absence_phrase, extract_urls, quoted_spans};
use crate::receipt::result_count;

use super::Scenario;

/// Runs of digits containing one inner `.`, such as `148.5`.
fn decimals(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        let run = text[start..i].trim_end_matches('.');
        let dotted = run.split('.').count() == 2 && !run.starts_with('.');
        if dotted {
            out.push(run);
        }
    }
    out
}

pub fn regex_baseline(s: &Scenario) -> Vec<Verdict> {
    let prose = s.llm_response.split(BLOCK_START).next().unwrap_or("");
    let haystack: String = s
        .tool_outputs
        .iter()
        .flat_map(|t| [t.raw_output.clone(), t.input.to_string()])
        .collect::<Vec<_>>()
        .join("\n")
        .to_lowercase();
    let counts: Vec<u64> = s.tool_outputs.iter().map(|t| result_count(&t.output)).collect();
    let mut out = Vec::new();

    if let Some(n) = count_mentions(prose, s.lang).into_iter().find(|n| !counts.contains(n)) {
        out.push(Verdict::new(
            VerdictKind::CountMismatch,
            format!("response mentions {n} results; outputs hold {counts:?}"),
        ));
    }
    if !counts.is_empty() && counts.iter().all(|&c| c > 0) && detect_absence_phrase(prose, s.lang) {
        out.push(Verdict::new(VerdictKind::FalseAbsence, "absence phrase with non-empty outputs"));
    }
    for url in extract_urls(prose) {
        if !haystack.contains(&url.to_lowercase()) {
            out.push(Verdict::new(VerdictKind::SourceUnverified, format!("{url} not in any tool output")));
        }
    }
    for span in quoted_spans(prose) {
        if !haystack.contains(&span.to_lowercase()) {
            out.push(Verdict::new(VerdictKind::FactMismatch, format!("quoted {span:?} not in any tool output")));
        }
    }
    for d in decimals(prose) {
        if !haystack.contains(d) {
            out.push(Verdict::new(VerdictKind::FactMismatch, format!("number {d} not in any tool output")));
        }
    }
    out
}
