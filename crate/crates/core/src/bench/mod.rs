//! Fault-injection benchmark: scenario generation, detector runs and
//! metrics.
//!
//! Scenarios are built from language-neutral drafts ([`ScenarioDraft`]) and
//! rendered into each language with shared receipt ids and tool outputs, so
//! an injected fault has the same structural signature in every rendering.

mod baseline;
mod deep;
mod render;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use uuid::Uuid;

use crate::claim::{Pramana, BLOCK_END, BLOCK_START};
use crate::clock::{FixedClock, Monotonic};
use crate::engine::{aggregate_trust, verify_response, TrustLevel, TrustPolicy, Verdict, VerdictKind};
use crate::lang::Lang;
use crate::ledger::Ledger;
use crate::policy::Constitution;
use crate::receipt::{generate_receipt, random_uuid, SigningKey, ToolExecution};

pub use baseline::regex_baseline;
pub use deep::{generate_deep_corpus, DeepCase, DeepCorpus};
pub use render::{Phrase, Rendered};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HallucinationType {
    FabricatedToolCall,
    CountMismatch,
    FactMismatch,
    InferenceAsFact,
    FalseAbsence,
    SourceFabrication,
}

impl HallucinationType {
    pub const ALL: [HallucinationType; 6] = [
        HallucinationType::FabricatedToolCall,
        HallucinationType::CountMismatch,
        HallucinationType::FactMismatch,
        HallucinationType::InferenceAsFact,
        HallucinationType::FalseAbsence,
        HallucinationType::SourceFabrication,
    ];

    /// Verdict the engine should give the injected claim.
    pub fn expected_verdict(self) -> VerdictKind {
        match self {
            HallucinationType::FabricatedToolCall => VerdictKind::FabricatedToolCall,
            HallucinationType::CountMismatch => VerdictKind::CountMismatch,
            HallucinationType::FactMismatch | HallucinationType::InferenceAsFact => VerdictKind::FactMismatch,
            HallucinationType::FalseAbsence => VerdictKind::FalseAbsence,
            HallucinationType::SourceFabrication => VerdictKind::SourceUnverified,
        }
    }

    /// Domains with a claim this injection can rewrite.
    pub fn compatible_domains(self) -> &'static [Domain] {
        use Domain::*;
        match self {
            HallucinationType::CountMismatch => &[Email, Calendar, Absence],
            HallucinationType::FalseAbsence => &[Email, Calendar, Finance, Web],
            _ => &Domain::ALL,
        }
    }

    /// Whether a response without a verification block still exposes the
    /// fault at text level (receipt references, counts, absence, URLs).
    pub fn visible_untagged(self) -> bool {
        !matches!(self, HallucinationType::FactMismatch | HallucinationType::InferenceAsFact)
    }

    pub fn name(self) -> &'static str {
        match self {
            HallucinationType::FabricatedToolCall => "FabricatedToolCall",
            HallucinationType::CountMismatch => "CountMismatch",
            HallucinationType::FactMismatch => "FactMismatch",
            HallucinationType::InferenceAsFact => "InferenceAsFact",
            HallucinationType::FalseAbsence => "FalseAbsence",
            HallucinationType::SourceFabrication => "SourceFabrication",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Email,
    Calendar,
    Finance,
    Web,
    Absence,
}

impl Domain {
    pub const ALL: [Domain; 5] = [Domain::Email, Domain::Calendar, Domain::Finance, Domain::Web, Domain::Absence];
}

/// Target trust level of a clean response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Three grounded claims.
    Fully,
    /// Four grounded claims and one speculation.
    Mostly,
    /// Three grounded claims and three speculations.
    Partial,
    /// Four grounded claims; the starting point for injections.
    Injectable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolCallRecord {
    pub receipt_id: Uuid,
    pub tool_name: String,
    pub input: Value,
    pub output: Value,
    pub raw_output: String,
    pub timestamp_ms: i64,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimTruth {
    pub pramana: Pramana,
    pub receipt_index: Option<usize>,
    pub expected: VerdictKind,
    /// Whether the claim is true of the world (tool data may be wrong).
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub claims: Vec<ClaimTruth>,
    pub expected_trust: TrustLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injection {
    pub kind: HallucinationType,
    pub claim_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub lang: Lang,
    pub domain: Domain,
    pub user_request: String,
    pub tool_outputs: Vec<ToolCallRecord>,
    pub llm_response: String,
    /// Whether the response carries a verification block.
    pub tagged: bool,
    pub ground_truth: GroundTruth,
    pub injected: Option<Injection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evidence {
    None,
    Receipts(Vec<usize>),
    /// An id that was never issued.
    Fabricated(Uuid),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimDraft {
    pub phrase: Phrase,
    pub pramana: Pramana,
    pub evidence: Evidence,
    pub expected: VerdictKind,
    pub correct: bool,
}

/// Language-neutral scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDraft {
    pub domain: Domain,
    pub variant: Variant,
    pub tool_calls: Vec<ToolCallRecord>,
    pub claims: Vec<ClaimDraft>,
    pub injected: Option<Injection>,
    /// Slot values for the user request.
    pub request_slots: (String, String),
}

const SENDERS: [&str; 8] = [
    "Alice Chen", "Bob Martin", "Carla Diaz", "Dev Patel", "Elena Rossi", "Farid Khan", "Grace Liu", "Hiro Tanaka",
];
const SUBJECTS: [&str; 8] = [
    "Budget review", "Contract renewal", "Team offsite", "Invoice reminder", "Hiring plan", "Security audit",
    "Quarterly targets", "Travel booking",
];
const TITLES: [&str; 8] = [
    "Design review", "Roadmap sync", "Client call", "Budget check-in", "Hiring sync", "Vendor demo", "Sprint planning",
    "Board prep",
];
const LOCATIONS: [&str; 6] = ["Orion room", "Lobby cafe", "Harbor office", "Video call", "Atlas room", "Garden hall"];
const SYMBOLS: [&str; 8] = ["ACME", "GLOBX", "INITECH", "UMBRA", "VERTEX", "HOOLI", "STARK", "WAYNE"];
const SITES: [(&str, &str); 6] = [
    ("reuters.com", "Reuters"),
    ("bbc.co.uk", "BBC"),
    ("nature.com", "Nature"),
    ("apnews.com", "AP News"),
    ("ft.com", "Financial Times"),
    ("theverge.com", "The Verge"),
];
const HEADLINES: [&str; 8] = [
    "Central bank holds rates steady",
    "New battery chemistry doubles range",
    "Coastal cities expand flood defenses",
    "Chip makers report record demand",
    "Rail strike talks resume",
    "Researchers map deep sea vents",
    "Wheat prices ease after harvest",
    "City council approves bike lanes",
];

/// Session start used for receipt timestamps.
const BASE_TIME_MS: i64 = 1_709_600_000_000;

fn choose<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

fn choose_other<'a>(rng: &mut ChaCha8Rng, items: &'a [&'a str], not: &str) -> &'a str {
    loop {
        let c = choose(rng, items);
        if *c != not {
            return c;
        }
    }
}

fn date(rng: &mut ChaCha8Rng) -> String {
    format!("2024-03-{:02}", rng.gen_range(1..=28))
}

fn record(rng: &mut ChaCha8Rng, seq: usize, tool: &str, input: Value, output: Value) -> ToolCallRecord {
    ToolCallRecord {
        receipt_id: random_uuid(rng),
        tool_name: tool.into(),
        raw_output: output.to_string(),
        input,
        output,
        timestamp_ms: BASE_TIME_MS + seq as i64 * 1_000,
        duration_ms: rng.gen_range(20..400),
    }
}

/// Decimal text exactly as the tool output serializes it.
fn money(cents: u64) -> (f64, String) {
    let v = cents as f64 / 100.0;
    (v, v.to_string())
}

fn claim(phrase: Phrase, pramana: Pramana, receipts: &[usize], expected: VerdictKind) -> ClaimDraft {
    ClaimDraft {
        phrase,
        pramana,
        evidence: if receipts.is_empty() {
            Evidence::None
        } else {
            Evidence::Receipts(receipts.to_vec())
        },
        expected,
        correct: true,
    }
}

fn email_call(rng: &mut ChaCha8Rng, seq: usize, n: usize) -> (ToolCallRecord, String, String, String) {
    let first = (choose(rng, &SENDERS).to_string(), choose(rng, &SUBJECTS).to_string(), date(rng));
    let mut results = vec![json!({"sender": first.0, "subject": first.1, "date": first.2})];
    for _ in 1..n {
        results.push(json!({"sender": choose(rng, &SENDERS), "subject": choose(rng, &SUBJECTS), "date": date(rng)}));
    }
    let rec = record(rng, seq, "email_search", json!({"query": "in:inbox newer_than:1d"}), json!({"results": results}));
    (rec, first.0, first.1, first.2)
}

fn calendar_call(rng: &mut ChaCha8Rng, seq: usize, n: usize) -> (ToolCallRecord, String, String, String) {
    let day = date(rng);
    let mut results = Vec::new();
    let mut first = (String::new(), String::new(), String::new());
    for i in 0..n {
        let title = choose(rng, &TITLES).to_string();
        let start = format!("{day}T{:02}:{:02}", 8 + i, [0, 15, 30, 45][rng.gen_range(0..4)]);
        let location = choose(rng, &LOCATIONS).to_string();
        if i == 0 {
            first = (title.clone(), start.clone(), location.clone());
        }
        results.push(json!({"title": title, "start": start, "location": location}));
    }
    let rec = record(rng, seq, "calendar_list", json!({"date": day}), json!({"results": results}));
    (rec, first.0, first.1, first.2)
}

fn grounded(domain: Domain, rng: &mut ChaCha8Rng) -> (Vec<ToolCallRecord>, Vec<ClaimDraft>, (String, String)) {
    use Pramana::*;
    use VerdictKind::{PremisesVerified, Verified};
    match domain {
        Domain::Email => {
            let n = rng.gen_range(2..=9);
            let (rec, sender, subject, d) = email_call(rng, 0, n);
            let claims = vec![
                claim(Phrase::EmailCount { n: n as u64 }, Pratyaksha, &[0], Verified),
                claim(Phrase::EmailSubject { sender: sender.clone(), subject: subject.clone() }, Pratyaksha, &[0], Verified),
                claim(Phrase::EmailDate { date: d }, Pratyaksha, &[0], Verified),
                claim(Phrase::EmailMood { sender, subject }, Anumana, &[0], PremisesVerified),
            ];
            (vec![rec], claims, Default::default())
        }
        Domain::Calendar => {
            let n = rng.gen_range(2..=6);
            let (rec, title, start, location) = calendar_call(rng, 0, n);
            let claims = vec![
                claim(Phrase::MeetingCount { n: n as u64 }, Pratyaksha, &[0], Verified),
                claim(Phrase::MeetingFirst { title: title.clone(), start }, Pratyaksha, &[0], Verified),
                claim(Phrase::MeetingPlace { location }, Pratyaksha, &[0], Verified),
                claim(Phrase::MeetingBusy { title }, Anumana, &[0], PremisesVerified),
            ];
            (vec![rec], claims, Default::default())
        }
        Domain::Finance => {
            let a = choose(rng, &SYMBOLS).to_string();
            let b = choose_other(rng, &SYMBOLS, &a).to_string();
            let (a_close, a_text) = money(rng.gen_range(2_000..50_000));
            let (b_close, b_text) = loop {
                let m = money(rng.gen_range(2_000..50_000));
                if m.1 != a_text {
                    break m;
                }
            };
            let (pct, pct_text) = {
                let bp: i64 = rng.gen_range(-500..=500);
                let v = bp as f64 / 100.0;
                (v, v.to_string())
            };
            let day = date(rng);
            let quote = |sym: &str, close: f64, pct: f64| json!({"symbol": sym, "close": close, "change_pct": pct, "date": day});
            let other_pct = rng.gen_range(-500..=500) as f64 / 100.0;
            let r0 = record(rng, 0, "stock_quote", json!({"symbol": a}), quote(&a, a_close, pct));
            let r1 = record(rng, 1, "stock_quote", json!({"symbol": b}), quote(&b, b_close, other_pct));
            let claims = vec![
                claim(Phrase::StockClose { symbol: a.clone(), close: a_text.clone() }, Pratyaksha, &[0], Verified),
                claim(Phrase::StockChange { symbol: a.clone(), pct: pct_text }, Pratyaksha, &[0], Verified),
                claim(
                    Phrase::StockCompare {
                        a: a.clone(),
                        b: b.clone(),
                        a_close: a_text,
                        b_close: b_text,
                        higher: a_close > b_close,
                    },
                    Upamana,
                    &[0, 1],
                    PremisesVerified,
                ),
                claim(Phrase::StockOutlook { symbol: a.clone() }, Anumana, &[0], PremisesVerified),
            ];
            (vec![r0, r1], claims, (a, b))
        }
        Domain::Web => {
            let (site, publisher) = *choose(rng, &SITES);
            let title = choose(rng, &HEADLINES).to_string();
            let slug: String = title.to_lowercase().replace(' ', "-");
            let url = format!("https://www.{site}/news/{slug}-{}", rng.gen_range(1000..9999));
            let body = format!("<html><h1>{title}</h1><p>{publisher} staff report.</p></html>");
            let r0 = record(
                rng,
                0,
                "web_fetch",
                json!({"url": url}),
                json!({"title": title, "publisher": publisher, "status": 200, "body": body}),
            );
            let claims = vec![
                claim(Phrase::WebTitle { title }, Pratyaksha, &[0], Verified),
                claim(Phrase::WebPublisher { publisher: publisher.into() }, Pratyaksha, &[0], Verified),
                claim(Phrase::WebCite { publisher: publisher.into(), url: url.clone() }, Sabda, &[], Verified),
                claim(Phrase::WebFollowUp { publisher: publisher.into() }, Anumana, &[0], PremisesVerified),
            ];
            (vec![r0], claims, (url, String::new()))
        }
        Domain::Absence => {
            let r0 = record(rng, 0, "email_search", json!({"query": "in:inbox newer_than:1d"}), json!({"results": []}));
            let n = rng.gen_range(2..=6);
            let (r1, title, start, _) = calendar_call(rng, 1, n);
            let claims = vec![
                claim(Phrase::EmailNone, Abhava, &[0], Verified),
                claim(Phrase::MeetingCount { n: n as u64 }, Pratyaksha, &[1], Verified),
                claim(Phrase::MeetingFirst { title: title.clone(), start }, Pratyaksha, &[1], Verified),
                claim(Phrase::MeetingBusy { title }, Anumana, &[1], PremisesVerified),
            ];
            (vec![r0, r1], claims, Default::default())
        }
    }
}

impl ScenarioDraft {
    /// A clean draft. Speculative claims are inferences whose premises are
    /// not in any receipt; each is true with probability 3/4.
    pub fn clean(domain: Domain, variant: Variant, rng: &mut ChaCha8Rng) -> ScenarioDraft {
        let (tool_calls, mut g, request_slots) = grounded(domain, rng);
        let speculations = match variant {
            Variant::Fully => {
                g.truncate(3);
                0
            }
            Variant::Mostly => 1,
            Variant::Partial => {
                g.truncate(3);
                3
            }
            Variant::Injectable => 0,
        };
        for which in 0..speculations {
            let mut c = claim(Phrase::Speculation { which }, Pramana::Anumana, &[0], VerdictKind::Unverifiable);
            c.correct = rng.gen_bool(0.75);
            g.push(c);
        }
        ScenarioDraft {
            domain,
            variant,
            tool_calls,
            claims: g,
            injected: None,
            request_slots,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.injected.is_none()
    }

    fn receipt_counts(&self) -> Vec<u64> {
        self.tool_calls
            .iter()
            .map(|t| crate::receipt::result_count(&t.output))
            .collect()
    }

    /// Trust level the engine should reach on the tagged rendering.
    pub fn expected_trust(&self, policy: &TrustPolicy) -> TrustLevel {
        let pairs: Vec<(bool, VerdictKind)> = self
            .claims
            .iter()
            .map(|c| (c.pramana != Pramana::Ungrounded, c.expected))
            .collect();
        aggregate_trust(&pairs, policy)
    }

    /// Renders the draft in `lang`. `dash_list` selects the block syntax.
    pub fn render(&self, id: String, lang: Lang, tagged: bool, dash_list: bool) -> Scenario {
        let ids: Vec<Uuid> = self.tool_calls.iter().map(|t| t.receipt_id).collect();
        let rendered: Vec<Rendered> = self.claims.iter().map(|c| c.phrase.render(lang)).collect();
        let evidence: Vec<Option<String>> = self
            .claims
            .iter()
            .map(|c| match &c.evidence {
                Evidence::None => None,
                Evidence::Receipts(ix) => Some(ix.iter().map(|&i| ids[i].to_string()).collect::<Vec<_>>().join(", ")),
                Evidence::Fabricated(u) => Some(u.to_string()),
            })
            .collect();
        let mut prose = String::new();
        for ((c, r), ev) in self.claims.iter().zip(&rendered).zip(&evidence) {
            if !prose.is_empty() {
                prose.push(' ');
            }
            prose.push_str(&r.text);
            if let (Pramana::Pratyaksha | Pramana::Abhava, Some(ev)) = (c.pramana, ev) {
                let first = ev.split(',').next().unwrap_or(ev);
                prose.push_str(&format!(" [ref {first}]"));
            }
        }
        let mut response = prose;
        if tagged {
            response.push_str("\n\n");
            response.push_str(BLOCK_START);
            response.push('\n');
            if dash_list {
                for ((c, r), ev) in self.claims.iter().zip(&rendered).zip(&evidence) {
                    response.push_str(&format!("- claim: {}\n", Value::String(r.text.clone())));
                    response.push_str(&format!("  source_type: {}\n", c.pramana.wire_token()));
                    response.push_str(&format!("  evidence: {}\n", ev.as_deref().unwrap_or("none")));
                    response.push_str("  checkable: true\n");
                    if let Some(a) = &r.asserts {
                        response.push_str(&format!("  asserts: {}\n", json!(a)));
                    }
                    if let Some(p) = &r.premises {
                        response.push_str(&format!("  premises: {}\n", json!(p)));
                    }
                }
            } else {
                let items: Vec<Value> = self
                    .claims
                    .iter()
                    .zip(&rendered)
                    .zip(&evidence)
                    .map(|((c, r), ev)| {
                        let mut o = json!({
                            "claim": r.text,
                            "source_type": c.pramana.wire_token(),
                            "evidence": ev,
                            "checkable": true,
                        });
                        if let Some(a) = &r.asserts {
                            o["asserts"] = json!(a);
                        }
                        if let Some(p) = &r.premises {
                            o["premises"] = json!(p);
                        }
                        o
                    })
                    .collect();
                response.push_str(&serde_json::to_string_pretty(&items).unwrap_or_default());
                response.push('\n');
            }
            response.push_str(BLOCK_END);
            response.push('\n');
        }
        let policy = TrustPolicy::default();
        let expected_trust = match (tagged, self.injected) {
            (true, _) => self.expected_trust(&policy),
            (false, Some(inj)) if inj.kind.visible_untagged() && inj.kind.expected_verdict().is_deterministic_failure() => {
                TrustLevel::Unreliable
            }
            (false, _) => TrustLevel::Ungrounded,
        };
        Scenario {
            id,
            lang,
            domain: self.domain,
            user_request: render::user_request(self.domain, lang, &self.request_slots.0, &self.request_slots.1),
            tool_outputs: self.tool_calls.clone(),
            llm_response: response,
            tagged,
            ground_truth: GroundTruth {
                claims: self
                    .claims
                    .iter()
                    .map(|c| ClaimTruth {
                        pramana: c.pramana,
                        receipt_index: match &c.evidence {
                            Evidence::Receipts(ix) => ix.first().copied(),
                            _ => None,
                        },
                        expected: c.expected,
                        correct: c.correct,
                    })
                    .collect(),
                expected_trust,
            },
            injected: self.injected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum InjectError {
    #[error("draft already carries an injection")]
    AlreadyInjected,
    #[error("{kind:?} cannot be injected into a {domain:?} scenario")]
    Incompatible { kind: HallucinationType, domain: Domain },
}

/// Rewrites one claim of a clean draft according to `kind`.
pub fn inject_hallucination(
    clean: &ScenarioDraft,
    kind: HallucinationType,
    seed: u64,
) -> Result<ScenarioDraft, InjectError> {
    if !clean.is_clean() {
        return Err(InjectError::AlreadyInjected);
    }
    let incompatible = InjectError::Incompatible {
        kind,
        domain: clean.domain,
    };
    if !kind.compatible_domains().contains(&clean.domain) {
        return Err(incompatible);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = clean.clone();
    let find = |d: &ScenarioDraft, pred: &dyn Fn(&ClaimDraft) -> bool| d.claims.iter().position(pred);
    let index = match kind {
        HallucinationType::FabricatedToolCall => {
            let i = find(&d, &|c| matches!(c.evidence, Evidence::Receipts(_)) && c.pramana == Pramana::Pratyaksha)
                .or_else(|| find(&d, &|c| matches!(c.evidence, Evidence::Receipts(_))))
                .ok_or(incompatible)?;
            d.claims[i].evidence = Evidence::Fabricated(random_uuid(&mut rng));
            i
        }
        HallucinationType::CountMismatch => {
            let counts = d.receipt_counts();
            let i = find(&d, &|c| matches!(c.phrase, Phrase::EmailCount { .. } | Phrase::MeetingCount { .. }))
                .ok_or(incompatible)?;
            let wrong = loop {
                let m = rng.gen_range(1..=12u64);
                if !counts.contains(&m) {
                    break m;
                }
            };
            match &mut d.claims[i].phrase {
                Phrase::EmailCount { n } | Phrase::MeetingCount { n } => *n = wrong,
                _ => unreachable!(),
            }
            i
        }
        HallucinationType::FactMismatch => {
            let i = find(&d, &|c| {
                matches!(
                    c.phrase,
                    Phrase::EmailSubject { .. } | Phrase::MeetingFirst { .. } | Phrase::StockClose { .. } | Phrase::WebTitle { .. }
                )
            })
            .ok_or(incompatible)?;
            match &mut d.claims[i].phrase {
                Phrase::EmailSubject { sender, .. } => *sender = choose_other(&mut rng, &SENDERS, sender).into(),
                Phrase::MeetingFirst { title, .. } => *title = choose_other(&mut rng, &TITLES, title).into(),
                Phrase::WebTitle { title } => *title = choose_other(&mut rng, &HEADLINES, title).into(),
                Phrase::StockClose { close, .. } => {
                    let v: f64 = close.parse().unwrap_or(100.0);
                    let cents = (v * 100.0) as u64 + rng.gen_range(150..2_500);
                    *close = money(cents).1;
                }
                _ => unreachable!(),
            }
            i
        }
        HallucinationType::InferenceAsFact => {
            let i = find(&d, &|c| c.pramana == Pramana::Anumana && c.expected == VerdictKind::PremisesVerified)
                .ok_or(incompatible)?;
            let c = &mut d.claims[i];
            c.phrase = match &c.phrase {
                Phrase::EmailMood { sender, subject } => Phrase::EmailUrgent {
                    sender: sender.clone(),
                    subject: subject.clone(),
                },
                Phrase::MeetingBusy { title } => Phrase::MeetingPriority { title: title.clone() },
                Phrase::StockOutlook { symbol } => Phrase::StockRating { symbol: symbol.clone() },
                Phrase::WebFollowUp { publisher } => Phrase::WebConfirmed {
                    publisher: publisher.clone(),
                },
                _ => return Err(incompatible),
            };
            c.pramana = Pramana::Pratyaksha;
            i
        }
        HallucinationType::FalseAbsence => {
            if d.receipt_counts().contains(&0) {
                return Err(incompatible);
            }
            d.claims = vec![claim(Phrase::NothingFound, Pramana::Abhava, &[0], VerdictKind::FalseAbsence)];
            0
        }
        HallucinationType::SourceFabrication => {
            let (site, publisher) = *choose(&mut rng, &SITES);
            let url = format!("https://www.{site}/analysis/outlook-{}", rng.gen_range(10_000..99_999));
            d.claims.push(claim(
                Phrase::SourceClaim {
                    publisher: publisher.into(),
                    url,
                },
                Pramana::Sabda,
                &[],
                VerdictKind::SourceUnverified,
            ));
            d.claims.len() - 1
        }
    };
    let c = &mut d.claims[index];
    c.expected = kind.expected_verdict();
    c.correct = false;
    d.variant = Variant::Injectable;
    d.injected = Some(Injection {
        kind,
        claim_index: index,
    });
    Ok(d)
}

/// Corpus shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Hallucinated scenarios per language; must be a multiple of six.
    pub hallucinated_per_lang: usize,
    pub clean_per_lang: usize,
    /// Fraction of scenarios that keep their verification block.
    pub compliance: f64,
    /// Fraction of compliant clean scenarios expected to be fully verified
    /// whose tool data is wrong.
    pub tool_error_rate: f64,
}

impl GenConfig {
    pub fn desk(seed: u64) -> Self {
        GenConfig {
            seed,
            hallucinated_per_lang: 60,
            clean_per_lang: 30,
            compliance: 0.9,
            tool_error_rate: 0.0,
        }
    }

    pub fn full_scale(seed: u64) -> Self {
        GenConfig {
            seed,
            hallucinated_per_lang: 300,
            clean_per_lang: 150,
            compliance: 0.9,
            tool_error_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("hallucinated count per language ({0}) must be divisible by 6")]
    CountsNotDivisible(usize),
    #[error("compliance fraction {0} is outside [0, 1]")]
    Compliance(f64),
    #[error("tool error rate {0} is outside [0, 1]")]
    ToolErrorRate(f64),
}

fn base_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Language-neutral drafts plus the per-draft `tagged` flag.
pub fn generate_drafts(cfg: &GenConfig) -> Result<Vec<(ScenarioDraft, bool)>, GenError> {
    if !cfg.hallucinated_per_lang.is_multiple_of(6) {
        return Err(GenError::CountsNotDivisible(cfg.hallucinated_per_lang));
    }
    if !(0.0..=1.0).contains(&cfg.compliance) {
        return Err(GenError::Compliance(cfg.compliance));
    }
    if !(0.0..=1.0).contains(&cfg.tool_error_rate) {
        return Err(GenError::ToolErrorRate(cfg.tool_error_rate));
    }
    let per_type = cfg.hallucinated_per_lang / 6;
    let mut drafts = Vec::with_capacity(cfg.hallucinated_per_lang + cfg.clean_per_lang);
    for k in 0..cfg.clean_per_lang {
        let mut rng = base_rng(cfg.seed, drafts.len() as u64);
        let domain = Domain::ALL[k % Domain::ALL.len()];
        let variant = [Variant::Fully, Variant::Mostly, Variant::Partial][(k / Domain::ALL.len()) % 3];
        drafts.push(ScenarioDraft::clean(domain, variant, &mut rng));
    }
    for kind in HallucinationType::ALL {
        let domains = kind.compatible_domains();
        for k in 0..per_type {
            let stream = drafts.len() as u64;
            let mut rng = base_rng(cfg.seed, stream);
            // A fabricated source joins a three-claim response, so it lands in
            // Partial (3/4 verified) rather than MostlyVerified (4/5).
            let variant = if kind == HallucinationType::SourceFabrication {
                Variant::Fully
            } else {
                Variant::Injectable
            };
            let base = ScenarioDraft::clean(domains[k % domains.len()], variant, &mut rng);
            let injected = inject_hallucination(&base, kind, rng.gen())
                .expect("generator only pairs injections with compatible domains");
            drafts.push(injected);
        }
    }

    let mut picker = base_rng(cfg.seed, u64::MAX);
    let omit = libm_round((1.0 - cfg.compliance) * drafts.len() as f64);
    let eligible = |d: &ScenarioDraft| d.injected.is_none_or(|i| i.kind.visible_untagged());
    let mut order: Vec<usize> = (0..drafts.len()).filter(|&i| eligible(&drafts[i])).collect();
    shuffle(&mut order, &mut picker);
    let mut rest: Vec<usize> = (0..drafts.len()).filter(|&i| !eligible(&drafts[i])).collect();
    shuffle(&mut rest, &mut picker);
    order.extend(rest);
    let mut tagged = vec![true; drafts.len()];
    for &i in order.iter().take(omit) {
        tagged[i] = false;
    }

    Ok(drafts.into_iter().zip(tagged).collect())
}

fn libm_round(x: f64) -> usize {
    (x + 0.5) as usize
}

fn shuffle(items: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Generates the corpus: every draft rendered in every language.
///
/// Tool-data errors are planted after rendering, over the whole corpus, into
/// compliant clean scenarios expected to be fully verified. The receipts still
/// agree with the response, so only the ground truth changes.
pub fn generate_scenarios(cfg: &GenConfig) -> Result<Vec<Scenario>, GenError> {
    let drafts = generate_drafts(cfg)?;
    let mut out = Vec::with_capacity(drafts.len() * Lang::ALL.len());
    for lang in Lang::ALL {
        for (i, (d, tagged)) in drafts.iter().enumerate() {
            out.push(d.render(format!("{}-{i:04}", lang.code()), lang, *tagged, i % 2 == 0));
        }
    }
    let mut fully: Vec<usize> = (0..out.len())
        .filter(|&i| {
            let s = &out[i];
            s.tagged && s.injected.is_none() && s.ground_truth.expected_trust == TrustLevel::FullyVerified
        })
        .collect();
    let mut picker = base_rng(cfg.seed, u64::MAX - 1);
    shuffle(&mut fully, &mut picker);
    let planted = libm_round(cfg.tool_error_rate * fully.len() as f64);
    for &i in fully.iter().take(planted) {
        out[i].ground_truth.claims[0].correct = false;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    Engine,
    Regex,
}

/// Builds the session ledger for a scenario from its tool calls.
pub fn build_ledger(s: &Scenario, key: &SigningKey, c: &Constitution) -> Ledger {
    let mut ledger = Ledger::new(key.key_id());
    for t in &s.tool_outputs {
        let exec = ToolExecution {
            tool_name: &t.tool_name,
            input: &t.input,
            raw_output: t.raw_output.as_bytes(),
            output: &t.output,
            duration_ms: t.duration_ms,
        };
        let id = t.receipt_id;
        let mut ids = move || id;
        if let Ok(r) = generate_receipt(&exec, &mut ids, &FixedClock(t.timestamp_ms), key, &c.facts) {
            let _ = ledger.append(r);
        }
    }
    ledger
}

/// Scored result of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub id: String,
    pub lang: Lang,
    pub injected: Option<HallucinationType>,
    pub detected: Option<bool>,
    /// Clean scenario with a deterministic-failure verdict.
    pub false_positive: bool,
    pub trust: Option<TrustLevel>,
    /// All ground-truth claims correct.
    pub all_correct: bool,
    pub latency_ms: f64,
    pub verdicts: Vec<VerdictKind>,
}

fn credited(kind: HallucinationType, v: VerdictKind, per_claim: bool) -> bool {
    v == kind.expected_verdict()
        || v.is_deterministic_failure()
        || (per_claim && kind == HallucinationType::InferenceAsFact && !v.is_verified())
}

pub fn evaluate_scenario(
    s: &Scenario,
    detector: Detector,
    c: &Constitution,
    key: &SigningKey,
    timer: &dyn Monotonic,
) -> ScenarioResult {
    let (verdicts, trust, latency_ms, injected_verdict) = match detector {
        Detector::Engine => {
            let ledger = build_ledger(s, key, c);
            let report = verify_response(&s.llm_response, &ledger, key, s.lang, &c.verify_options(), timer);
            let kinds: Vec<VerdictKind> = report.verdict_kinds().collect();
            let at = s
                .injected
                .filter(|_| report.compliant)
                .and_then(|i| kinds.get(i.claim_index).copied());
            (kinds, Some(report.trust), report.elapsed_ms, at)
        }
        Detector::Regex => {
            let start = timer.now_us();
            let v: Vec<VerdictKind> = regex_baseline(s).into_iter().map(|v: Verdict| v.kind).collect();
            (v, None, crate::clock::elapsed_ms(timer, start), None)
        }
    };
    let detected = s.injected.map(|i| match injected_verdict {
        Some(v) => credited(i.kind, v, true),
        None => verdicts.iter().any(|&v| credited(i.kind, v, false)),
    });
    ScenarioResult {
        id: s.id.clone(),
        lang: s.lang,
        injected: s.injected.map(|i| i.kind),
        detected,
        false_positive: s.injected.is_none() && verdicts.iter().any(|v| v.is_deterministic_failure()),
        trust,
        all_correct: s.ground_truth.claims.iter().all(|c| c.correct),
        latency_ms,
        verdicts,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub total: usize,
    pub hits: usize,
}

impl Rate {
    pub fn value(&self) -> Option<f64> {
        (self.total > 0).then(|| self.hits as f64 / self.total as f64)
    }

    fn add(&mut self, hit: bool) {
        self.total += 1;
        self.hits += hit as usize;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeRow {
    pub kind: HallucinationType,
    pub overall: Rate,
    /// In [`Lang::ALL`] order.
    pub per_lang: Vec<Rate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub median_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub level: TrustLevel,
    pub responses: usize,
    pub all_correct: usize,
    pub fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub rows: Vec<CalibrationRow>,
    /// FullyVerified ≥ MostlyVerified ≥ Partial ≥ Unreliable over non-empty rows.
    pub monotone: bool,
}

/// Per trust level, the fraction of responses whose ground-truth claims are
/// all correct.
pub fn compute_calibration(items: &[(TrustLevel, bool)]) -> CalibrationTable {
    let rows: Vec<CalibrationRow> = TrustLevel::ALL
        .iter()
        .map(|&level| {
            let at: Vec<bool> = items.iter().filter(|(l, _)| *l == level).map(|(_, c)| *c).collect();
            let ok = at.iter().filter(|c| **c).count();
            CalibrationRow {
                level,
                responses: at.len(),
                all_correct: ok,
                fraction: (!at.is_empty()).then(|| ok as f64 / at.len() as f64),
            }
        })
        .collect();
    let ordered: Vec<f64> = rows
        .iter()
        .filter(|r| r.level != TrustLevel::Ungrounded)
        .filter_map(|r| r.fraction)
        .collect();
    CalibrationTable {
        monotone: ordered.windows(2).all(|w| w[0] >= w[1]),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub detector: Detector,
    pub scenarios: usize,
    pub detection: Rate,
    pub per_type: Vec<TypeRow>,
    /// In [`Lang::ALL`] order.
    pub per_lang: Vec<Rate>,
    pub false_positives: Rate,
    pub latency: LatencyStats,
    pub trust_counts: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationTable>,
}

fn lang_index(l: Lang) -> usize {
    Lang::ALL.iter().position(|x| *x == l).unwrap_or(0)
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (p * (sorted.len() - 1) as f64 + 0.5) as usize;
    sorted[rank.min(sorted.len() - 1)]
}

pub fn summarize(detector: Detector, results: &[ScenarioResult]) -> BenchReport {
    let empty = Rate { total: 0, hits: 0 };
    let mut detection = empty;
    let mut per_lang = vec![empty; Lang::ALL.len()];
    let mut per_type: Vec<TypeRow> = HallucinationType::ALL
        .iter()
        .map(|&kind| TypeRow {
            kind,
            overall: empty,
            per_lang: vec![empty; Lang::ALL.len()],
        })
        .collect();
    let mut fp = empty;
    let mut trust_counts = BTreeMap::new();
    let mut calibration = Vec::new();
    for r in results {
        match (r.injected, r.detected) {
            (Some(kind), Some(hit)) => {
                detection.add(hit);
                per_lang[lang_index(r.lang)].add(hit);
                let row = &mut per_type[HallucinationType::ALL.iter().position(|k| *k == kind).unwrap_or(0)];
                row.overall.add(hit);
                row.per_lang[lang_index(r.lang)].add(hit);
            }
            _ => fp.add(r.false_positive),
        }
        if let Some(t) = r.trust {
            *trust_counts.entry(t.name().to_string()).or_insert(0) += 1;
            calibration.push((t, r.all_correct));
        }
    }
    let mut lat: Vec<f64> = results.iter().map(|r| r.latency_ms).collect();
    lat.sort_by(f64::total_cmp);
    BenchReport {
        detector,
        scenarios: results.len(),
        detection,
        per_type,
        per_lang,
        false_positives: fp,
        latency: LatencyStats {
            median_ms: percentile(&lat, 0.5),
            p95_ms: percentile(&lat, 0.95),
            max_ms: lat.last().copied().unwrap_or(0.0),
        },
        trust_counts,
        calibration: (!calibration.is_empty()).then(|| compute_calibration(&calibration)),
    }
}

/// Sequential run over a corpus.
pub fn run_benchmark(
    scenarios: &[Scenario],
    detector: Detector,
    c: &Constitution,
    key: &SigningKey,
    timer: &dyn Monotonic,
) -> BenchReport {
    let results: Vec<ScenarioResult> = scenarios
        .iter()
        .map(|s| evaluate_scenario(s, detector, c, key, timer))
        .collect();
    summarize(detector, &results)
}

fn pct(r: &Rate) -> String {
    r.value().map_or_else(|| "   n/a".into(), |v| format!("{:5.1}%", v * 100.0))
}

impl BenchReport {
    /// Copy with timing fields zeroed, for determinism comparisons.
    pub fn without_latency(&self) -> BenchReport {
        let mut r = self.clone();
        r.latency = LatencyStats {
            median_ms: 0.0,
            p95_ms: 0.0,
            max_ms: 0.0,
        };
        r
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let label = match self.detector {
            Detector::Engine => "receipt engine",
            Detector::Regex => "output-regex baseline",
        };
        out.push_str(&format!("detector: {label}  scenarios: {}\n\n", self.scenarios));
        out.push_str("metric              value\n");
        out.push_str(&format!("detection rate      {}  ({}/{})\n", pct(&self.detection), self.detection.hits, self.detection.total));
        out.push_str(&format!(
            "false positive rate {}  ({}/{})\n",
            pct(&self.false_positives),
            self.false_positives.hits,
            self.false_positives.total
        ));
        out.push_str(&format!(
            "latency median      {:.3} ms  p95 {:.3} ms\n\n",
            self.latency.median_ms, self.latency.p95_ms
        ));
        out.push_str(&format!("{:<20}{:>8}", "type", "all"));
        for l in Lang::ALL {
            out.push_str(&format!("{:>8}", l.code()));
        }
        out.push('\n');
        for row in &self.per_type {
            out.push_str(&format!("{:<20}{:>8}", row.kind.name(), pct(&row.overall)));
            for r in &row.per_lang {
                out.push_str(&format!("{:>8}", pct(r)));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<20}{:>8}", "all types", pct(&self.detection)));
        for r in &self.per_lang {
            out.push_str(&format!("{:>8}", pct(r)));
        }
        out.push('\n');
        if let Some(cal) = &self.calibration {
            out.push_str("\ntrust level         responses  all claims correct\n");
            for row in &cal.rows {
                let f = row.fraction.map_or_else(|| "n/a".into(), |v| format!("{:.1}%", v * 100.0));
                out.push_str(&format!("{:<20}{:>9}  {f}\n", row.level.name(), row.responses));
            }
            out.push_str(&format!("monotone: {}\n", if cal.monotone { "yes" } else { "no" }));
        }
        out
    }
}
