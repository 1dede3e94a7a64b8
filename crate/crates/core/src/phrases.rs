//! Text scanning helpers backed by the embedded per-language tables:
//! absence phrases, result nouns and comparatives, plus receipt-id and URL
//! extraction.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::lang::Lang;
use crate::numeral::{is_numeral_char, normalize_numeral};

const ABSENCE: &str = include_str!("../data/absence.tsv");
const RESULT_NOUNS: &str = include_str!("../data/result_nouns.tsv");
const COMPARATIVES: &str = include_str!("../data/comparatives.tsv");
const COUNT_MODIFIERS: &str = include_str!("../data/count_modifiers.tsv");

/// Longest gap a `*` in an absence pattern may span, in characters.
const MAX_GAP: usize = 40;

/// Chinese measure words that may sit between a numeral and its noun.
const ZH_CLASSIFIERS: &[char] = &['封', '个', '個', '条', '條', '场', '場', '项', '項', '次', '篇', '份', '位', '则'];

fn table_rows(table: &'static str) -> impl Iterator<Item = Vec<&'static str>> {
    table
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').map(str::trim).collect())
}

fn rows_for(table: &'static str, lang: Lang) -> impl Iterator<Item = Vec<&'static str>> {
    table_rows(table).filter(move |r| r.first() == Some(&lang.code()))
}

/// Lowercases and collapses runs of whitespace to one space.
pub fn fold_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        for c in word.chars() {
            out.extend(c.to_lowercase());
        }
    }
    out
}

/// Normalization used when comparing claimed values with receipt facts:
/// case-fold, whitespace collapse, and punctuation trimmed from both ends
/// (signs are kept).
pub fn normalize_value(text: &str) -> String {
    let folded = fold_whitespace(text);
    folded
        .trim_matches(|c: char| !(is_word_char(c) || c == '-' || c == '+'))
        .into()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || ('\u{0900}'..='\u{097F}').contains(&c)
}

fn trim_token(tok: &str) -> &str {
    tok.trim_matches(|c: char| !is_word_char(c))
}

/// True if `text` contains an absence phrase ("no results", "nothing
/// found", or the language's equivalents).
pub fn detect_absence_phrase(text: &str, lang: Lang) -> bool {
    let hay = fold_whitespace(text);
    let word_bounded = matches!(lang, Lang::En | Lang::Es);
    rows_for(ABSENCE, lang)
        .filter_map(|r| r.get(1).copied())
        .any(|pattern| pattern_matches(&hay, &pattern.to_lowercase(), word_bounded))
}

fn pattern_matches(hay: &str, pattern: &str, word_bounded: bool) -> bool {
    let pieces: Vec<&str> = pattern.split('*').map(str::trim).filter(|p| !p.is_empty()).collect();
    let Some((first, rest)) = pieces.split_first() else {
        return false;
    };
    let trailing_wildcard = pattern.trim_end().ends_with('*');
    let mut from = 0;
    while let Some(off) = hay[from..].find(first) {
        let start = from + off;
        from = start + first.len();
        if word_bounded && !at_word_start(hay, start) {
            continue;
        }
        let mut pos = start + first.len();
        let mut ok = true;
        for piece in rest {
            match find_within_gap(hay, pos, piece) {
                Some(end) => pos = end,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && trailing_wildcard {
            // The wildcard must cover at least one word.
            ok = hay[pos..].trim_start().chars().next().is_some_and(is_word_char);
        }
        if ok {
            return true;
        }
    }
    false
}

fn at_word_start(hay: &str, idx: usize) -> bool {
    hay[..idx].chars().next_back().is_none_or(|c| !is_word_char(c))
}

/// Finds `piece` starting within [`MAX_GAP`] chars of `pos` without
/// crossing a sentence boundary; returns the end offset.
fn find_within_gap(hay: &str, pos: usize, piece: &str) -> Option<usize> {
    for (gap, (off, c)) in hay[pos..].char_indices().enumerate() {
        if hay[pos + off..].starts_with(piece) {
            return Some(pos + off + piece.len());
        }
        if matches!(c, '.' | '!' | '?' | '。' | '！' | '？' | '।') || gap >= MAX_GAP {
            return None;
        }
    }
    None
}

pub fn is_result_noun(word: &str, lang: Lang) -> bool {
    let w = word.to_lowercase();
    rows_for(RESULT_NOUNS, lang).any(|r| r.get(1) == Some(&w.as_str()))
}

fn is_count_modifier(word: &str, lang: Lang) -> bool {
    let w = word.to_lowercase();
    rows_for(COUNT_MODIFIERS, lang).any(|r| r.get(1) == Some(&w.as_str()))
}

/// Length in bytes of the longest Chinese count modifier at the start of `rest`.
fn zh_modifier_len(rest: &str) -> usize {
    rows_for(COUNT_MODIFIERS, Lang::Zh)
        .filter_map(|r| r.get(1).copied())
        .filter(|m| rest.starts_with(m))
        .map(str::len)
        .max()
        .unwrap_or(0)
}

fn zh_noun_at(rest: &str) -> bool {
    rows_for(RESULT_NOUNS, Lang::Zh).any(|r| r.get(1).is_some_and(|n| rest.starts_with(n)))
}

/// Integers written directly before a tool-result noun ("3 emails",
/// "三封邮件"), optionally with one modifier in between ("6 new messages").
/// Other numbers in the text (dates, prices) are ignored.
pub fn count_mentions(text: &str, lang: Lang) -> Vec<u64> {
    if lang == Lang::Zh {
        return zh_count_mentions(text);
    }
    let tokens: Vec<&str> = text.split_whitespace().map(trim_token).collect();
    let noun_follows = |i: usize| match tokens.get(i + 1) {
        Some(w) if is_result_noun(w, lang) => true,
        Some(w) if is_count_modifier(w, lang) => tokens.get(i + 2).is_some_and(|n| is_result_noun(n, lang)),
        _ => false,
    };
    (0..tokens.len())
        .filter(|&i| noun_follows(i))
        .filter_map(|i| normalize_numeral(tokens[i], lang))
        .collect()
}

fn zh_count_mentions(text: &str) -> Vec<u64> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !is_numeral_char(c, Lang::Zh) {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len()
            && (is_numeral_char(chars[i].1, Lang::Zh)
                || (matches!(chars[i].1, ',' | '.') && i + 1 < chars.len() && chars[i + 1].1.is_ascii_digit()))
        {
            i += 1;
        }
        // 第一 ("the first") is an ordinal, not a count.
        if start > 0 && chars[start - 1].1 == '第' {
            continue;
        }
        let run_end = chars.get(i).map_or(text.len(), |(b, _)| *b);
        let run = &text[chars[start].0..run_end];
        let mut j = i;
        while j < chars.len() && chars[j].1.is_whitespace() {
            j += 1;
        }
        if j < chars.len() && ZH_CLASSIFIERS.contains(&chars[j].1) {
            j += 1;
        }
        while j < chars.len() && chars[j].1.is_whitespace() {
            j += 1;
        }
        if j < chars.len() {
            let at = chars[j].0;
            j += text[at..at + zh_modifier_len(&text[at..])].chars().count();
        }
        if j < chars.len() && zh_noun_at(&text[chars[j].0..]) {
            if let Some(v) = normalize_numeral(run, Lang::Zh) {
                out.push(v);
            }
        }
    }
    out
}

/// Substrings shaped like a hyphenated UUID (8-4-4-4-12 hex digits).
pub fn find_receipt_ids(text: &str) -> Vec<&str> {
    const LEN: usize = 36;
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i + LEN <= bytes.len() {
        let window = &bytes[i..i + LEN];
        let shaped = window.iter().enumerate().all(|(k, b)| match k {
            8 | 13 | 18 | 23 => *b == b'-',
            _ => b.is_ascii_hexdigit(),
        });
        let left_ok = i == 0 || !bytes[i - 1].is_ascii_alphanumeric();
        let right_ok = bytes.get(i + LEN).is_none_or(|b| !b.is_ascii_alphanumeric());
        if shaped && left_ok && right_ok {
            out.push(&text[i..i + LEN]);
            i += LEN;
        } else {
            i += 1;
        }
    }
    out
}

/// `http(s)://` URLs in `text`, with trailing sentence punctuation removed.
pub fn extract_urls(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let lower = text.to_ascii_lowercase();
    let mut from = 0;
    while let Some(off) = ["https://", "http://"]
        .iter()
        .filter_map(|p| lower[from..].find(p))
        .min()
    {
        let start = from + off;
        let end = text[start..]
            .char_indices()
            .find(|(_, c)| c.is_whitespace() || matches!(c, ')' | ']' | '>' | '<' | '"' | '\'' | '，' | '。' | '、' | '）' | '」' | '”' | '।'))
            .map_or(text.len(), |(i, _)| start + i);
        let url = text[start..end].trim_end_matches(['.', ',', ';', ':', '!', '?']);
        if url.len() > "https://".len() && !out.iter().any(|u| u == url) {
            out.push(url.into());
        }
        from = end.max(start + 1);
    }
    out
}

/// Canonical form for URL comparison: lowercased scheme and host, default
/// port dropped, fragment dropped, trailing slash stripped.
pub fn normalize_url(url: &str) -> String {
    let url = url.trim();
    let url = url.split('#').next().unwrap_or(url);
    let Some((scheme, rest)) = url.split_once("://") else {
        return url.to_lowercase().trim_end_matches('/').into();
    };
    let scheme = scheme.to_ascii_lowercase();
    let split = rest.find(['/', '?']).unwrap_or(rest.len());
    let (authority, tail) = rest.split_at(split);
    let mut host = authority.to_ascii_lowercase();
    let default_port = match scheme.as_str() {
        "http" => Some(":80"),
        "https" => Some(":443"),
        _ => None,
    };
    if let Some(p) = default_port {
        if let Some(h) = host.strip_suffix(p) {
            host = h.into();
        }
    }
    let (path, query) = match tail.split_once('?') {
        Some((p, q)) => (p, Some(q)),
        None => (tail, None),
    };
    let mut out = String::with_capacity(url.len());
    out.push_str(&scheme);
    out.push_str("://");
    out.push_str(&host);
    out.push_str(path.trim_end_matches('/'));
    if let Some(q) = query {
        out.push('?');
        out.push_str(q);
    }
    out
}

/// Host part of a URL, lowercased, without a leading `www.`.
pub fn url_host(url: &str) -> Option<String> {
    let rest = url.split_once("://")?.1;
    let host = rest.split(['/', '?', '#', ':']).next()?.to_ascii_lowercase();
    Some(host.strip_prefix("www.").unwrap_or(&host).into())
}

const ENTITY_STOPWORDS: &[&str] = &[
    "the", "this", "that", "these", "those", "your", "you", "it", "he", "she", "they", "we", "there",
    "according", "el", "la", "los", "las", "tu", "su", "según", "hay", "tienes", "and", "but",
];

/// Non-empty spans between straight, curly, guillemet or corner quotes.
pub fn quoted_spans(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for (open, close) in [('"', '"'), ('“', '”'), ('«', '»'), ('「', '」'), ('‘', '’')] {
        let mut rest = text;
        while let Some(s) = rest.find(open) {
            let after = &rest[s + open.len_utf8()..];
            let Some(e) = after.find(close) else { break };
            let span = after[..e].trim();
            if !span.is_empty() {
                out.push(span.into());
            }
            rest = &after[e + close.len_utf8()..];
        }
    }
    out
}

/// Candidate named entities: capitalized words (3+ letters) and quoted spans.
pub fn entity_tokens(text: &str) -> Vec<String> {
    let mut out = quoted_spans(text);
    for word in text.split_whitespace().map(trim_token) {
        let mut chars = word.chars();
        let capital = chars.next().is_some_and(char::is_uppercase);
        if capital
            && word.chars().count() >= 3
            && !ENTITY_STOPWORDS.contains(&word.to_lowercase().as_str())
            && !out.iter().any(|o| o == word)
        {
            out.push(word.into());
        }
    }
    out
}

/// Direction asserted by a comparison: `Greater` when the text says the
/// first comparand is larger. `None` if no (or conflicting) comparatives.
pub fn comparison_direction(text: &str, lang: Lang) -> Option<Ordering> {
    let hay = fold_whitespace(text);
    let mut found = None;
    for row in rows_for(COMPARATIVES, lang) {
        let (Some(dir), Some(phrase)) = (row.get(1), row.get(2)) else {
            continue;
        };
        if hay.contains(&phrase.to_lowercase()) {
            let d = if *dir == "gt" { Ordering::Greater } else { Ordering::Less };
            match found {
                None => found = Some(d),
                Some(prev) if prev != d => return None,
                Some(_) => {}
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absence_examples() {
        assert!(detect_absence_phrase("No emails were found matching your query", Lang::En));
        assert!(!detect_absence_phrase("Alice sent you 3 emails", Lang::En));
        assert!(detect_absence_phrase("no se encontraron resultados", Lang::Es));
        assert!(detect_absence_phrase("कोई परिणाम नहीं मिला।", Lang::Hi));
        assert!(detect_absence_phrase("没有找到任何结果。", Lang::Zh));
        assert!(detect_absence_phrase("  NOTHING   found ", Lang::En));
    }

    #[test]
    fn absence_wildcards_respect_boundaries() {
        // gap crosses a sentence end
        assert!(!detect_absence_phrase("No worries. I found it", Lang::En));
        assert!(!detect_absence_phrase("piano results", Lang::En));
        assert!(!detect_absence_phrase("You have no", Lang::En));
        assert!(detect_absence_phrase("You have no meetings today", Lang::En));
    }

    #[test]
    fn counts() {
        assert_eq!(count_mentions("Alice sent you 3 emails on 2024-02-19.", Lang::En), vec![3]);
        assert_eq!(count_mentions("ACME closed at 148.5", Lang::En), Vec::<u64>::new());
        assert_eq!(count_mentions("Alice te envió 1.200 correos", Lang::Es), vec![1200]);
        assert_eq!(count_mentions("Alice ने आपको ३ ईमेल भेजे।", Lang::Hi), vec![3]);
        assert_eq!(count_mentions("Alice给你发了三封邮件。", Lang::Zh), vec![3]);
        assert_eq!(count_mentions("你明天有 4 场会议", Lang::Zh), vec![4]);
        assert_eq!(count_mentions("第一场会议是预算评审", Lang::Zh), Vec::<u64>::new());
        assert_eq!(count_mentions("Five results came back", Lang::En), vec![5]);
    }

    #[test]
    fn receipt_ids() {
        let t = "see [ref 1b4e28ba-2fa1-11d2-883f-0016d3cca427] and x1b4e28ba-2fa1-11d2-883f-0016d3cca427";
        assert_eq!(find_receipt_ids(t), vec!["1b4e28ba-2fa1-11d2-883f-0016d3cca427"]);
    }

    #[test]
    fn urls() {
        let t = "According to Reuters (https://www.reuters.com/markets/rates), rates rise. See http://a.io/x.";
        assert_eq!(
            extract_urls(t),
            vec!["https://www.reuters.com/markets/rates".to_string(), "http://a.io/x".into()]
        );
        assert_eq!(normalize_url("https://Example.com/"), normalize_url("https://example.com"));
        assert_eq!(normalize_url("HTTP://Example.com:80/a/"), "http://example.com/a");
        assert_eq!(normalize_url("https://e.com/?q=A"), "https://e.com?q=A");
        assert_eq!(url_host("https://www.reuters.com/x").as_deref(), Some("reuters.com"));
    }

    #[test]
    fn entities() {
        let e = entity_tokens("Alice seems worried about the \"Deadline update\" email");
        assert!(e.contains(&"Alice".to_string()));
        assert!(e.contains(&"Deadline update".to_string()));
        assert!(!entity_tokens("The meeting").iter().any(|t| t == "The"));
    }

    #[test]
    fn comparatives() {
        assert_eq!(comparison_direction("A is higher than B", Lang::En), Some(Ordering::Greater));
        assert_eq!(comparison_direction("A 低于 B", Lang::Zh), Some(Ordering::Less));
        assert_eq!(comparison_direction("A is fine", Lang::En), None);
    }
}
