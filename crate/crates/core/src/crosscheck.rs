//! Independent checks for autonomous-agent outputs that carry no receipts.
//!
//! Five strategies run over a [`DeepAgentOutput`]: schema validation, URL
//! re-fetch, exact computation replay, temporal consistency and
//! cross-source comparison of key numbers. Network access goes through a
//! [`Fetcher`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::clock::{elapsed_ms, Monotonic};
use crate::expr::{evaluate, replay_matches, ExprError};
use crate::phrases::fold_whitespace;
use crate::receipt::sha256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrossCheckConfig {
    /// Relative difference above which a key number is flagged.
    pub rel_tol: f64,
    /// How far in the future a timestamp may lie before it is flagged.
    pub future_skew_hours: f64,
    pub fetch_timeout_ms: u64,
}

impl Default for CrossCheckConfig {
    fn default() -> Self {
        CrossCheckConfig {
            rel_tol: 0.01,
            future_skew_hours: 24.0,
            fetch_timeout_ms: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DeepAgentOutput {
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<Schema>,
    pub cited_urls: Vec<CitedUrl>,
    pub computations: Vec<Computation>,
    pub dated_items: Vec<DatedItem>,
    pub orderings: Vec<TemporalOrdering>,
    pub key_facts: Vec<KeyFact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedUrl {
    pub url: String,
    /// Text the agent says it found at the URL.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excerpt: Option<String>,
    /// Hex SHA-256 of the body the agent saw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Computation {
    pub expr: String,
    pub claimed: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatedItem {
    pub label: String,
    pub timestamp: String,
}

/// `before` must not be later than `after`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalOrdering {
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyFact {
    pub name: String,
    pub claimed: f64,
    pub query_id: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Schema {
    pub fields: Vec<FieldRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRule {
    /// Dotted path into `result`; numeric segments index arrays.
    pub path: String,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub kind: Option<TypeTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default = "yes")]
    pub required: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeTag {
    String,
    Number,
    Integer,
    Boolean,
    Array,
    Object,
    Null,
}

impl TypeTag {
    fn accepts(self, v: &Value) -> bool {
        match self {
            TypeTag::String => v.is_string(),
            TypeTag::Number => v.is_number(),
            TypeTag::Integer => v.is_i64() || v.is_u64() || v.as_f64().is_some_and(|f| f % 1.0 == 0.0),
            TypeTag::Boolean => v.is_boolean(),
            TypeTag::Array => v.is_array(),
            TypeTag::Object => v.is_object(),
            TypeTag::Null => v.is_null(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Schema,
    Refetch,
    Replay,
    Temporal,
    CrossSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Flagged,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub strategy: Strategy,
    pub target: String,
    pub outcome: Outcome,
    pub detail: String,
}

impl Finding {
    fn new(strategy: Strategy, target: &str, outcome: Outcome, detail: impl Into<String>) -> Self {
        Finding {
            strategy,
            target: target.into(),
            outcome,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub findings: Vec<Finding>,
    pub flagged: usize,
    pub indeterminate: usize,
    pub elapsed_ms: f64,
}

impl CrossCheckReport {
    pub fn is_flagged(&self) -> bool {
        self.flagged > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchOutcome {
    Response { status: u16, body: String },
    Timeout,
    Failed(String),
}

pub trait Fetcher {
    fn fetch(&self, url: &str, timeout_ms: u64) -> FetchOutcome;
    /// Value of a key number from an independent source.
    fn query_source(&self, id: &str) -> Option<f64>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureResponse {
    #[serde(default = "ok_status")]
    pub status: u16,
    #[serde(default)]
    pub body: String,
    #[serde(default)]
    pub latency_ms: u64,
}

fn ok_status() -> u16 {
    200
}

/// Canned responses. Unknown URLs answer 404; entries slower than the
/// timeout time out.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FixtureFetcher {
    pub urls: BTreeMap<String, FixtureResponse>,
    pub sources: BTreeMap<String, f64>,
}

impl Fetcher for FixtureFetcher {
    fn fetch(&self, url: &str, timeout_ms: u64) -> FetchOutcome {
        match self.urls.get(url) {
            None => FetchOutcome::Response {
                status: 404,
                body: String::new(),
            },
            Some(r) if r.latency_ms > timeout_ms => FetchOutcome::Timeout,
            Some(r) => FetchOutcome::Response {
                status: r.status,
                body: r.body.clone(),
            },
        }
    }

    fn query_source(&self, id: &str) -> Option<f64> {
        self.sources.get(id).copied()
    }
}

fn resolve_dotted<'v>(root: &'v Value, path: &str) -> Option<&'v Value> {
    path.split('.')
        .filter(|s| !s.is_empty())
        .try_fold(root, |v, seg| match v {
            Value::Array(items) => items.get(seg.parse::<usize>().ok()?),
            Value::Object(map) => map.get(seg),
            _ => None,
        })
}

pub fn validate_schema(result: &Value, schema: &Schema) -> Vec<Finding> {
    schema
        .fields
        .iter()
        .map(|rule| {
            let f = |o, d: String| Finding::new(Strategy::Schema, &rule.path, o, format!("{}: {d}", rule.path));
            let Some(v) = resolve_dotted(result, &rule.path).filter(|v| !v.is_null() || rule.kind == Some(TypeTag::Null)) else {
                return if rule.required {
                    f(Outcome::Flagged, "required field is missing".into())
                } else {
                    f(Outcome::Pass, "optional field absent".into())
                };
            };
            if let Some(kind) = rule.kind {
                if !kind.accepts(v) {
                    return f(Outcome::Flagged, format!("expected {kind:?}, found {v}"));
                }
            }
            if rule.min.is_some() || rule.max.is_some() {
                let Some(x) = v.as_f64() else {
                    return f(Outcome::Flagged, format!("bounded field is not numeric: {v}"));
                };
                if rule.min.is_some_and(|m| x < m) || rule.max.is_some_and(|m| x > m) {
                    return f(Outcome::Flagged, format!("{x} is out of range"));
                }
            }
            f(Outcome::Pass, "conforms".into())
        })
        .collect()
}

/// Tag-stripped, entity-decoded, whitespace-folded page text.
pub fn page_text(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut in_tag = false;
    for c in html.chars() {
        match c {
            '<' => {
                in_tag = true;
                out.push(' ');
            }
            '>' if in_tag => in_tag = false,
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    let decoded = out
        .replace("&nbsp;", " ")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&amp;", "&");
    fold_whitespace(&decoded)
}

pub fn refetch_urls(cited: &[CitedUrl], fetcher: &dyn Fetcher, timeout_ms: u64) -> Vec<Finding> {
    cited
        .iter()
        .map(|c| {
            let f = |o, d: String| Finding::new(Strategy::Refetch, &c.url, o, d);
            match fetcher.fetch(&c.url, timeout_ms) {
                FetchOutcome::Timeout => f(Outcome::Indeterminate, format!("no response within {timeout_ms} ms")),
                FetchOutcome::Failed(e) => f(Outcome::Indeterminate, format!("fetch failed: {e}")),
                FetchOutcome::Response { status, .. } if !(200..300).contains(&status) => {
                    f(Outcome::Flagged, format!("status {status}"))
                }
                FetchOutcome::Response { body, .. } => {
                    if let Some(d) = &c.digest {
                        if !d.eq_ignore_ascii_case(&hex::encode(sha256(body.as_bytes()))) {
                            return f(Outcome::Flagged, "body digest differs".into());
                        }
                    }
                    if let Some(ex) = &c.excerpt {
                        let want = fold_whitespace(ex);
                        if !want.is_empty() && !page_text(&body).contains(&want) {
                            return f(Outcome::Flagged, "excerpt not found on the page".into());
                        }
                    }
                    f(Outcome::Pass, "page matches".into())
                }
            }
        })
        .collect()
}

pub fn replay_computations(comps: &[Computation]) -> Vec<Finding> {
    comps
        .iter()
        .map(|c| {
            let f = |o, d: String| Finding::new(Strategy::Replay, &c.expr, o, d);
            match evaluate(&c.expr) {
                Err(ExprError::DivisionByZero) => f(Outcome::Flagged, "expression divides by zero".into()),
                Err(e) => f(Outcome::Indeterminate, format!("cannot evaluate: {e}")),
                Ok(v) if replay_matches(&v, c.claimed) => f(Outcome::Pass, "replayed exactly".into()),
                Ok(v) => f(Outcome::Flagged, format!("claimed {}, replay gives {v}", c.claimed)),
            }
        })
        .collect()
}

/// Milliseconds since the epoch, UTC. Accepts RFC 3339, naive date-times
/// and plain dates.
pub fn parse_timestamp_ms(text: &str) -> Option<i64> {
    let t = text.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(t) {
        return Some(dt.timestamp_millis());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(t, fmt) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    let d = NaiveDate::parse_from_str(t, "%Y-%m-%d").ok()?;
    Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis())
}

pub fn check_temporal(
    items: &[DatedItem],
    orderings: &[TemporalOrdering],
    now_ms: i64,
    future_skew_hours: f64,
) -> Vec<Finding> {
    let limit = now_ms as f64 + future_skew_hours * 3_600_000.0;
    let mut times = BTreeMap::new();
    let mut out = Vec::new();
    for item in items {
        let f = |o, d: String| Finding::new(Strategy::Temporal, &item.label, o, d);
        match parse_timestamp_ms(&item.timestamp) {
            None => out.push(f(Outcome::Indeterminate, format!("unparseable timestamp {:?}", item.timestamp))),
            Some(ms) => {
                times.insert(item.label.as_str(), ms);
                out.push(if ms as f64 > limit {
                    f(Outcome::Flagged, format!("{} lies in the future", item.timestamp))
                } else {
                    f(Outcome::Pass, "not in the future".into())
                });
            }
        }
    }
    for o in orderings {
        let target = format!("{} <= {}", o.before, o.after);
        let f = |out, d: &str| Finding::new(Strategy::Temporal, &target, out, d);
        out.push(match (times.get(o.before.as_str()), times.get(o.after.as_str())) {
            (Some(a), Some(b)) if a <= b => f(Outcome::Pass, "ordering holds"),
            (Some(_), Some(_)) => f(Outcome::Flagged, "ordering violated"),
            _ => f(Outcome::Indeterminate, "ordering refers to an unknown or undated item"),
        });
    }
    out
}

/// Relative difference `|claimed - independent| / max(|independent|, 1e-12)`.
pub fn relative_difference(claimed: f64, independent: f64) -> f64 {
    (claimed - independent).abs() / independent.abs().max(1e-12)
}

pub fn cross_source_check(facts: &[KeyFact], fetcher: &dyn Fetcher, rel_tol: f64) -> Vec<Finding> {
    facts
        .iter()
        .map(|k| {
            let f = |o, d: String| Finding::new(Strategy::CrossSource, &k.name, o, d);
            match fetcher.query_source(&k.query_id) {
                None => f(Outcome::Indeterminate, format!("source {:?} has no value", k.query_id)),
                Some(v) => {
                    let d = relative_difference(k.claimed, v);
                    if d > rel_tol {
                        f(Outcome::Flagged, format!("claimed {}, independent source says {v}", k.claimed))
                    } else {
                        f(Outcome::Pass, format!("within {rel_tol} of {v}"))
                    }
                }
            }
        })
        .collect()
}

/// Runs every strategy that has input.
pub fn crosscheck(
    output: &DeepAgentOutput,
    fetcher: &dyn Fetcher,
    config: &CrossCheckConfig,
    now_ms: i64,
    timer: &dyn Monotonic,
) -> CrossCheckReport {
    let start = timer.now_us();
    let mut findings = Vec::new();
    if let Some(schema) = &output.schema {
        findings.extend(validate_schema(&output.result, schema));
    }
    findings.extend(refetch_urls(&output.cited_urls, fetcher, config.fetch_timeout_ms));
    findings.extend(replay_computations(&output.computations));
    findings.extend(check_temporal(
        &output.dated_items,
        &output.orderings,
        now_ms,
        config.future_skew_hours,
    ));
    findings.extend(cross_source_check(&output.key_facts, fetcher, config.rel_tol));
    findings.sort_by(|a, b| (a.strategy, &a.target).cmp(&(b.strategy, &b.target)));
    let count = |o| findings.iter().filter(|f| f.outcome == o).count();
    CrossCheckReport {
        flagged: count(Outcome::Flagged),
        indeterminate: count(Outcome::Indeterminate),
        findings,
        elapsed_ms: elapsed_ms(timer, start),
    }
}

impl core::fmt::Display for Strategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Strategy::Schema => "schema",
            Strategy::Refetch => "refetch",
            Strategy::Replay => "replay",
            Strategy::Temporal => "temporal",
            Strategy::CrossSource => "cross_source",
        })
    }
}

impl core::fmt::Display for Outcome {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Flagged => "flagged",
            Outcome::Indeterminate => "indeterminate",
        })
    }
}

impl FixtureFetcher {
    pub fn with_page(mut self, url: &str, status: u16, body: &str) -> Self {
        self.urls.insert(
            url.to_string(),
            FixtureResponse {
                status,
                body: body.into(),
                latency_ms: 0,
            },
        );
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn cross_source_boundary() {
        let mut fx = FixtureFetcher::default();
        fx.sources.insert("acme_close".into(), 148.50);
        let facts = [KeyFact {
            name: "close".into(),
            claimed: 150.0,
            query_id: "acme_close".into(),
        }];
        let f = cross_source_check(&facts, &fx, 0.01);
        assert_eq!(f[0].outcome, Outcome::Flagged);
        let f = cross_source_check(&facts, &fx, 0.02);
        assert_eq!(f[0].outcome, Outcome::Pass);
    }

    #[test]
    fn refetch_outcomes() {
        let fx = FixtureFetcher::default().with_page("https://a.example/x", 200, "<p>Rates rose by <b>0.25</b> points</p>");
        let cited = |url: &str, ex: &str| CitedUrl {
            url: url.into(),
            excerpt: Some(ex.into()),
            digest: None,
        };
        let f = refetch_urls(&[cited("https://a.example/x", "rates rose by 0.25 points")], &fx, 100);
        assert_eq!(f[0].outcome, Outcome::Pass);
        let f = refetch_urls(&[cited("https://a.example/x", "rates fell")], &fx, 100);
        assert_eq!(f[0].outcome, Outcome::Flagged);
        let f = refetch_urls(&[cited("https://a.example/missing", "x")], &fx, 100);
        assert_eq!(f[0].outcome, Outcome::Flagged);
        let mut slow = fx.clone();
        slow.urls.get_mut("https://a.example/x").unwrap().latency_ms = 500;
        let f = refetch_urls(&[cited("https://a.example/x", "rates")], &slow, 100);
        assert_eq!(f[0].outcome, Outcome::Indeterminate);
    }

    #[test]
    fn temporal() {
        let now = parse_timestamp_ms("2024-06-01T00:00:00Z").unwrap();
        let items = [
            DatedItem { label: "filed".into(), timestamp: "2024-05-01".into() },
            DatedItem { label: "approved".into(), timestamp: "2024-04-01T10:00:00+02:00".into() },
            DatedItem { label: "launch".into(), timestamp: "2024-06-03 09:00:00".into() },
        ];
        let ord = [TemporalOrdering { before: "filed".into(), after: "approved".into() }];
        let f = check_temporal(&items, &ord, now, 24.0);
        let flagged: Vec<&str> = f.iter().filter(|x| x.outcome == Outcome::Flagged).map(|x| x.target.as_str()).collect();
        assert_eq!(flagged, ["launch", "filed <= approved"]);
    }

    #[test]
    fn schema() {
        let result = json!({"total": 12, "items": [{"name": "a"}], "score": 1.5});
        let schema = Schema {
            fields: alloc::vec![
                FieldRule { path: "total".into(), kind: Some(TypeTag::Integer), min: Some(0.0), max: None, required: true },
                FieldRule { path: "items.0.name".into(), kind: Some(TypeTag::String), min: None, max: None, required: true },
                FieldRule { path: "score".into(), kind: Some(TypeTag::Number), min: None, max: Some(1.0), required: true },
                FieldRule { path: "owner".into(), kind: None, min: None, max: None, required: true },
            ],
        };
        let outcomes: Vec<Outcome> = validate_schema(&result, &schema).iter().map(|f| f.outcome).collect();
        assert_eq!(outcomes, [Outcome::Pass, Outcome::Pass, Outcome::Flagged, Outcome::Flagged]);
    }

    #[test]
    fn replay() {
        let f = replay_computations(&[
            Computation { expr: "148.5 * 2".into(), claimed: 297.0 },
            Computation { expr: "100 / 3".into(), claimed: 33.0 },
            Computation { expr: "1 / (2 - 2)".into(), claimed: 0.0 },
        ]);
        let o: Vec<Outcome> = f.iter().map(|x| x.outcome).collect();
        assert_eq!(o, [Outcome::Pass, Outcome::Flagged, Outcome::Flagged]);
    }
}
