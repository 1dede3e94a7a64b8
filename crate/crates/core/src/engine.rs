//! Claim verification against the receipt ledger and trust aggregation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::claim::{parse_verification_block, Claim, Pramana};
use crate::clock::{elapsed_ms, Monotonic};
use crate::lang::Lang;
use crate::ledger::Ledger;
use crate::numeral::{normalize_numeral, parse_number};
use crate::phrases::{
    comparison_direction, count_mentions, detect_absence_phrase, entity_tokens, extract_urls,
    find_receipt_ids, normalize_url, normalize_value, url_host,
};
use crate::receipt::{sha256, verify_receipt_signature, SigningKey, ToolReceipt};

/// Outcome of checking one claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    Verified,
    PremisesVerified,
    FabricatedToolCall,
    CountMismatch,
    FactMismatch,
    FalseAbsence,
    SourceUnverified,
    SignatureInvalid,
    Unverifiable,
}

impl VerdictKind {
    pub const ALL: [VerdictKind; 9] = [
        VerdictKind::Verified,
        VerdictKind::PremisesVerified,
        VerdictKind::FabricatedToolCall,
        VerdictKind::CountMismatch,
        VerdictKind::FactMismatch,
        VerdictKind::FalseAbsence,
        VerdictKind::SourceUnverified,
        VerdictKind::SignatureInvalid,
        VerdictKind::Unverifiable,
    ];

    /// Failures established by comparison with signed data, as opposed to
    /// claims that merely could not be checked.
    pub fn is_deterministic_failure(self) -> bool {
        matches!(
            self,
            VerdictKind::FabricatedToolCall
                | VerdictKind::CountMismatch
                | VerdictKind::FactMismatch
                | VerdictKind::FalseAbsence
                | VerdictKind::SignatureInvalid
        )
    }

    pub fn is_verified(self) -> bool {
        matches!(self, VerdictKind::Verified | VerdictKind::PremisesVerified)
    }

    /// Rank used when several problems apply to one claim; the highest wins.
    pub fn precedence(self) -> u8 {
        match self {
            VerdictKind::SignatureInvalid => 8,
            VerdictKind::FabricatedToolCall => 7,
            VerdictKind::FalseAbsence => 6,
            VerdictKind::CountMismatch => 5,
            VerdictKind::FactMismatch => 4,
            VerdictKind::SourceUnverified => 3,
            VerdictKind::Unverifiable => 2,
            VerdictKind::PremisesVerified => 1,
            VerdictKind::Verified => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_receipt: Option<Uuid>,
}

impl Verdict {
    pub fn new(kind: VerdictKind, detail: impl Into<String>) -> Self {
        Verdict {
            kind,
            detail: detail.into(),
            cited_receipt: None,
        }
    }

    fn citing(mut self, id: Option<Uuid>) -> Self {
        self.cited_receipt = id;
        self
    }
}

/// Response-level trust.
///
/// The first four levels are ordered. `Ungrounded` (nothing checkable) is
/// only comparable with itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrustLevel {
    FullyVerified,
    MostlyVerified,
    Partial,
    Unreliable,
    Ungrounded,
}

impl TrustLevel {
    pub const ALL: [TrustLevel; 5] = [
        TrustLevel::FullyVerified,
        TrustLevel::MostlyVerified,
        TrustLevel::Partial,
        TrustLevel::Unreliable,
        TrustLevel::Ungrounded,
    ];

    fn rank(self) -> Option<u8> {
        match self {
            TrustLevel::FullyVerified => Some(3),
            TrustLevel::MostlyVerified => Some(2),
            TrustLevel::Partial => Some(1),
            TrustLevel::Unreliable => Some(0),
            TrustLevel::Ungrounded => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TrustLevel::FullyVerified => "FullyVerified",
            TrustLevel::MostlyVerified => "MostlyVerified",
            TrustLevel::Partial => "Partial",
            TrustLevel::Unreliable => "Unreliable",
            TrustLevel::Ungrounded => "Ungrounded",
        }
    }
}

impl PartialOrd for TrustLevel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            return Some(Ordering::Equal);
        }
        Some(self.rank()?.cmp(&other.rank()?))
    }
}

impl core::fmt::Display for TrustLevel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("threshold {0} is not a finite number in [0, 1]")]
    OutOfRange(f64),
    #[error("thresholds must satisfy 0.5 <= partial_min <= mostly_min <= 1 (got partial_min={partial_min}, mostly_min={mostly_min})")]
    Inconsistent { partial_min: f64, mostly_min: f64 },
}

/// A threshold held as an exact decimal fraction so that `verified /
/// checkable >= t` is decided without rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Exact {
    num: u128,
    den: u128,
}

impl Exact {
    fn from_f64(t: f64) -> Option<Exact> {
        if !t.is_finite() || !(0.0..=1.0).contains(&t) {
            return None;
        }
        // The shortest round-trip decimal is what the user wrote.
        let text = t.to_string();
        let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
        let frac = &frac[..frac.len().min(30)];
        let den = 10u128.pow(frac.len() as u32);
        let num = int.parse::<u128>().ok()? * den + if frac.is_empty() { 0 } else { frac.parse::<u128>().ok()? };
        Some(Exact { num, den })
    }

    fn at_most(self, verified: usize, checkable: usize) -> bool {
        (verified as u128) * self.den >= self.num * (checkable as u128)
    }
}

/// Trust-level cut-offs on the verified fraction of checkable claims.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustPolicy {
    pub mostly_min: f64,
    pub partial_min: f64,
}

impl Default for TrustPolicy {
    fn default() -> Self {
        TrustPolicy {
            mostly_min: 0.8,
            partial_min: 0.5,
        }
    }
}

impl TrustPolicy {
    pub fn new(mostly_min: f64, partial_min: f64) -> Result<Self, PolicyError> {
        let p = TrustPolicy {
            mostly_min,
            partial_min,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        for t in [self.mostly_min, self.partial_min] {
            if Exact::from_f64(t).is_none() {
                return Err(PolicyError::OutOfRange(t));
            }
        }
        if !(0.5 <= self.partial_min && self.partial_min <= self.mostly_min) {
            return Err(PolicyError::Inconsistent {
                partial_min: self.partial_min,
                mostly_min: self.mostly_min,
            });
        }
        Ok(())
    }

    fn exact(&self) -> (Exact, Exact) {
        let d = TrustPolicy::default();
        (
            Exact::from_f64(self.mostly_min).unwrap_or(Exact::from_f64(d.mostly_min).unwrap()),
            Exact::from_f64(self.partial_min).unwrap_or(Exact::from_f64(d.partial_min).unwrap()),
        )
    }
}

/// Folds verdicts into a trust level. Each item is `(checkable, kind)`.
///
/// Any deterministic failure makes the response unreliable. Otherwise the
/// level follows the fraction of checkable claims that verified.
pub fn aggregate_trust(verdicts: &[(bool, VerdictKind)], policy: &TrustPolicy) -> TrustLevel {
    if verdicts.iter().any(|(_, k)| k.is_deterministic_failure()) {
        return TrustLevel::Unreliable;
    }
    let checkable = verdicts.iter().filter(|(c, _)| *c).count();
    if checkable == 0 {
        return TrustLevel::Ungrounded;
    }
    let verified = verdicts.iter().filter(|(c, k)| *c && k.is_verified()).count();
    let (mostly, partial) = policy.exact();
    if verified == checkable {
        TrustLevel::FullyVerified
    } else if mostly.at_most(verified, checkable) {
        TrustLevel::MostlyVerified
    } else if partial.at_most(verified, checkable) {
        TrustLevel::Partial
    } else {
        TrustLevel::Unreliable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Tools whose receipts count as fetches of an external source.
    pub fetch_tools: Vec<String>,
    pub policy: TrustPolicy,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            fetch_tools: alloc::vec!["web_fetch".into(), "http_get".into()],
            policy: TrustPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimVerdict {
    pub claim: Claim,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedFraction {
    pub verified: usize,
    pub checkable: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustReport {
    /// Hex prefix of the SHA-256 of the response text.
    pub response_id: String,
    pub compliant: bool,
    pub claims: Vec<ClaimVerdict>,
    pub trust: TrustLevel,
    pub verified_fraction: VerifiedFraction,
    pub deterministic_failures: usize,
    pub elapsed_ms: f64,
}

impl TrustReport {
    pub fn verdict_kinds(&self) -> impl Iterator<Item = VerdictKind> + '_ {
        self.claims.iter().map(|c| c.verdict.kind)
    }
}

/// Shared state for one verification pass. Signature checks are memoized.
struct Checker<'a> {
    ledger: &'a Ledger,
    key: &'a SigningKey,
    lang: Lang,
    opts: &'a VerifyOptions,
    valid: RefCell<BTreeMap<Uuid, bool>>,
}

impl<'a> Checker<'a> {
    fn new(ledger: &'a Ledger, key: &'a SigningKey, lang: Lang, opts: &'a VerifyOptions) -> Self {
        Checker {
            ledger,
            key,
            lang,
            opts,
            valid: RefCell::new(BTreeMap::new()),
        }
    }

    fn is_valid(&self, r: &ToolReceipt) -> bool {
        if let Some(v) = self.valid.borrow().get(&r.id) {
            return *v;
        }
        let v = verify_receipt_signature(r, self.key);
        self.valid.borrow_mut().insert(r.id, v);
        v
    }

    fn valid_receipts(&self) -> impl Iterator<Item = &'a ToolReceipt> + '_ {
        self.ledger.iter().filter(|r| self.is_valid(r))
    }

    /// Resolves the evidence field. `Ok(empty)` means no evidence was given.
    fn resolve_evidence(&self, evidence: Option<&str>) -> Result<Vec<&'a ToolReceipt>, Verdict> {
        let Some(ev) = evidence else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        let mut worst: Option<Verdict> = None;
        let tokens = ev
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .map(|t| t.trim_matches(|c: char| matches!(c, '[' | ']' | '"' | '\'' | '(' | ')')))
            .filter(|t| !t.is_empty());
        for tok in tokens {
            let v = match self.ledger.lookup(tok) {
                Err(_) => Verdict::new(
                    VerdictKind::FabricatedToolCall,
                    format!("evidence {tok:?} is not a receipt id"),
                ),
                Ok(None) => Verdict::new(
                    VerdictKind::FabricatedToolCall,
                    format!("no receipt {tok} in the ledger"),
                ),
                Ok(Some(r)) if !self.is_valid(r) => Verdict::new(
                    VerdictKind::SignatureInvalid,
                    format!("receipt {} failed signature verification", r.id),
                )
                .citing(Some(r.id)),
                Ok(Some(r)) => {
                    out.push(r);
                    continue;
                }
            };
            if worst.as_ref().is_none_or(|w| v.kind.precedence() > w.kind.precedence()) {
                worst = Some(v);
            }
        }
        match worst {
            Some(v) => Err(v),
            None => Ok(out),
        }
    }

    fn verify(&self, claim: &Claim) -> Verdict {
        let receipts = match self.resolve_evidence(claim.evidence.as_deref()) {
            Ok(r) => r,
            Err(v) => return v,
        };
        let first = receipts.first().map(|r| r.id);
        let v = match claim.source_type {
            Pramana::Ungrounded => Verdict::new(VerdictKind::Unverifiable, "claim carries no evidence"),
            Pramana::Pratyaksha if receipts.is_empty() => {
                Verdict::new(VerdictKind::Unverifiable, "tool-output claim cites no receipt")
            }
            Pramana::Pratyaksha => self.pratyaksha(claim, &receipts),
            Pramana::Abhava if receipts.is_empty() => {
                Verdict::new(VerdictKind::Unverifiable, "absence claim cites no receipt")
            }
            Pramana::Abhava => abhava(&receipts),
            Pramana::Anumana => self.anumana(claim, &receipts),
            Pramana::Upamana => self.upamana(claim, &receipts),
            Pramana::Sabda => self.sabda(claim),
        };
        if v.cited_receipt.is_some() {
            v
        } else {
            v.citing(first)
        }
    }

    fn pratyaksha(&self, claim: &Claim, receipts: &[&ToolReceipt]) -> Verdict {
        let counts: Vec<u64> = receipts.iter().map(|r| r.result_count).collect();
        if detect_absence_phrase(&claim.text, self.lang) && counts.iter().any(|&c| c > 0) {
            return Verdict::new(
                VerdictKind::FalseAbsence,
                format!("claim reports no results but the receipt holds {}", counts[0]),
            );
        }
        match claim.assert_value("count") {
            Some(raw) => match parse_count(raw, self.lang) {
                Some(n) if counts.contains(&n) => {}
                _ => {
                    return Verdict::new(
                        VerdictKind::CountMismatch,
                        format!("claimed count {raw} but the receipt holds {}", counts[0]),
                    )
                }
            },
            None => {
                if let Some(n) = count_mentions(&claim.text, self.lang)
                    .into_iter()
                    .find(|n| !counts.contains(n))
                {
                    return Verdict::new(
                        VerdictKind::CountMismatch,
                        format!("claimed {n} results but the receipt holds {}", counts[0]),
                    );
                }
            }
        }
        if let Some(asserts) = &claim.asserts {
            for (key, claimed) in asserts {
                if matches!(key.as_str(), "count" | "source" | "url") {
                    continue;
                }
                let facts: Vec<&str> = receipts
                    .iter()
                    .filter_map(|r| r.facts.get(key).map(String::as_str))
                    .collect();
                if facts.is_empty() {
                    return Verdict::new(
                        VerdictKind::FactMismatch,
                        format!("receipt records no fact {key:?}"),
                    );
                }
                if !facts.iter().any(|f| values_match(claimed, f, self.lang)) {
                    return Verdict::new(
                        VerdictKind::FactMismatch,
                        format!("{key}: claimed {claimed:?}, receipt has {:?}", facts[0]),
                    );
                }
            }
        }
        Verdict::new(VerdictKind::Verified, "matches the cited receipt")
    }

    fn anumana(&self, claim: &Claim, receipts: &[&ToolReceipt]) -> Verdict {
        if receipts.is_empty() {
            return Verdict::new(VerdictKind::Unverifiable, "inference cites no receipt");
        }
        let haystack: Vec<String> = receipts
            .iter()
            .flat_map(|r| r.facts.iter())
            .flat_map(|(k, v)| [normalize_value(k), normalize_value(v)])
            .collect();
        let found = |p: &str| {
            let p = normalize_value(p);
            !p.is_empty() && haystack.iter().any(|h| h.contains(&p))
        };
        let premises = match &claim.premises {
            Some(p) if !p.is_empty() => p.clone(),
            _ => entity_tokens(&claim.text),
        };
        if premises.is_empty() {
            return Verdict::new(VerdictKind::Unverifiable, "inference names no premises");
        }
        match premises.iter().find(|p| !found(p)) {
            None => Verdict::new(VerdictKind::PremisesVerified, "premises found in the cited receipt"),
            Some(p) => Verdict::new(
                VerdictKind::Unverifiable,
                format!("premise {p:?} is not in the cited receipt"),
            ),
        }
    }

    fn upamana(&self, claim: &Claim, receipts: &[&ToolReceipt]) -> Verdict {
        let premises = claim.premises.as_deref().unwrap_or(&[]);
        if premises.len() < 2 {
            return Verdict::new(VerdictKind::Unverifiable, "comparison lacks comparands");
        }
        let pool: Vec<&ToolReceipt> = if receipts.is_empty() {
            self.valid_receipts().collect()
        } else {
            receipts.to_vec()
        };
        let locate = |p: &str| -> Option<String> {
            pool.iter()
                .flat_map(|r| r.facts.values())
                .find(|v| values_match(p, v, self.lang))
                .cloned()
        };
        let (Some(a), Some(b)) = (locate(&premises[0]), locate(&premises[1])) else {
            return Verdict::new(VerdictKind::Unverifiable, "comparands not found in any receipt");
        };
        if let (Some(x), Some(y), Some(dir)) = (
            parse_number(&a, Lang::En),
            parse_number(&b, Lang::En),
            comparison_direction(&claim.text, self.lang),
        ) {
            if x.partial_cmp(&y).is_some_and(|actual| actual != dir) {
                return Verdict::new(
                    VerdictKind::FactMismatch,
                    format!("comparison contradicts the receipts ({a} vs {b})"),
                );
            }
        }
        Verdict::new(VerdictKind::PremisesVerified, "both comparands found in receipts")
    }

    fn sabda(&self, claim: &Claim) -> Verdict {
        let mut candidates: Vec<String> = claim.cited_urls.clone();
        let bare_source = claim
            .assert_value("source")
            .filter(|s| !s.contains("://"))
            .map(normalize_value);
        if candidates.is_empty() && bare_source.is_none() {
            return Verdict::new(VerdictKind::Unverifiable, "testimony names no source");
        }
        let fetched: Vec<&ToolReceipt> = self
            .ledger
            .iter()
            .filter(|r| self.opts.fetch_tools.contains(&r.tool_name))
            .collect();
        let fetched_url = |r: &ToolReceipt| r.facts.get("url").map(|u| normalize_url(u));
        let mut matched = None;
        candidates.iter_mut().for_each(|c| *c = normalize_url(c));
        let mut requirements: Vec<Vec<&ToolReceipt>> = candidates
            .iter()
            .map(|c| {
                fetched
                    .iter()
                    .copied()
                    .filter(|r| fetched_url(r).as_deref() == Some(c.as_str()))
                    .collect()
            })
            .collect();
        if let Some(src) = &bare_source {
            requirements.push(
                fetched
                    .iter()
                    .copied()
                    .filter(|r| {
                        let host = r.facts.get("url").and_then(|u| url_host(u));
                        let publisher = r.facts.get("publisher").map(|p| normalize_value(p));
                        host.is_some_and(|h| h == *src || h.split('.').next() == Some(src.as_str()))
                            || publisher.as_deref() == Some(src.as_str())
                    })
                    .collect(),
            );
        }
        for reqs in &requirements {
            if reqs.is_empty() {
                return Verdict::new(VerdictKind::SourceUnverified, "cited source was never fetched");
            }
            match reqs.iter().find(|r| self.is_valid(r)) {
                Some(r) => matched = matched.or(Some(r.id)),
                None => {
                    return Verdict::new(
                        VerdictKind::SignatureInvalid,
                        "fetch receipt for the cited source failed signature verification",
                    )
                    .citing(Some(reqs[0].id))
                }
            }
        }
        Verdict::new(VerdictKind::Verified, "cited source was fetched").citing(matched)
    }

    /// Text-level checks for responses without a usable verification block.
    fn untagged_screen(&self, prose: &str) -> Vec<Verdict> {
        let mut out = Vec::new();
        for tok in find_receipt_ids(prose) {
            match self.ledger.lookup(tok) {
                Ok(Some(r)) if self.is_valid(r) => {}
                Ok(Some(r)) => out.push(
                    Verdict::new(
                        VerdictKind::SignatureInvalid,
                        format!("referenced receipt {} failed signature verification", r.id),
                    )
                    .citing(Some(r.id)),
                ),
                _ => out.push(Verdict::new(
                    VerdictKind::FabricatedToolCall,
                    format!("prose references unknown receipt {tok}"),
                )),
            }
        }
        let fetched: Vec<String> = self
            .valid_receipts()
            .filter(|r| self.opts.fetch_tools.contains(&r.tool_name))
            .filter_map(|r| r.facts.get("url").map(|u| normalize_url(u)))
            .collect();
        for url in extract_urls(prose) {
            if !fetched.contains(&normalize_url(&url)) {
                out.push(Verdict::new(
                    VerdictKind::SourceUnverified,
                    format!("prose cites {url}, which was never fetched"),
                ));
            }
        }
        let counts: Vec<u64> = self.valid_receipts().map(|r| r.result_count).collect();
        if counts.is_empty() {
            return out;
        }
        // An absence statement is only contradicted when no receipt is empty.
        if detect_absence_phrase(prose, self.lang) && counts.iter().all(|&c| c > 0) {
            out.push(Verdict::new(
                VerdictKind::FalseAbsence,
                "prose reports no results but every receipt holds results",
            ));
        }
        if let Some(n) = count_mentions(prose, self.lang)
            .into_iter()
            .find(|n| !counts.contains(n))
        {
            out.push(Verdict::new(
                VerdictKind::CountMismatch,
                format!("prose mentions {n} results; no receipt holds that many"),
            ));
        }
        out
    }
}

fn abhava(receipts: &[&ToolReceipt]) -> Verdict {
    match receipts.iter().find(|r| r.result_count > 0) {
        None => Verdict::new(VerdictKind::Verified, "the cited tool returned no results"),
        Some(r) => Verdict::new(
            VerdictKind::FalseAbsence,
            format!("receipt {} holds {} results", r.id, r.result_count),
        )
        .citing(Some(r.id)),
    }
}

fn parse_count(raw: &str, lang: Lang) -> Option<u64> {
    let t = normalize_value(raw);
    normalize_numeral(&t, lang).or_else(|| normalize_numeral(&t, Lang::En))
}

/// Compares a claimed value with a receipt fact: equal after normalization,
/// or numerically equal (exactly for integers, to 1e-9 relative otherwise).
pub fn values_match(claimed: &str, fact: &str, lang: Lang) -> bool {
    let c = normalize_value(claimed);
    let f = normalize_value(fact);
    if c == f {
        return true;
    }
    match (
        parse_number(&c, lang).or_else(|| parse_number(&c, Lang::En)),
        parse_number(&f, Lang::En),
    ) {
        (Some(x), Some(y)) => {
            if x % 1.0 == 0.0 && y % 1.0 == 0.0 {
                x == y
            } else {
                (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
            }
        }
        _ => false,
    }
}

/// Checks one claim against the ledger.
pub fn verify_claim(
    claim: &Claim,
    ledger: &Ledger,
    key: &SigningKey,
    lang: Lang,
    opts: &VerifyOptions,
) -> Verdict {
    Checker::new(ledger, key, lang, opts).verify(claim)
}

/// Parses `response`, verifies every claim and aggregates a trust level.
///
/// Responses without a usable block are also screened at text level (cited
/// receipt ids, cited URLs, absence phrases, counts); what the screen finds is reported
/// as extra non-checkable claims.
pub fn verify_response(
    response: &str,
    ledger: &Ledger,
    key: &SigningKey,
    lang: Lang,
    opts: &VerifyOptions,
    timer: &dyn Monotonic,
) -> TrustReport {
    let start = timer.now_us();
    let parsed = parse_verification_block(response);
    let checker = Checker::new(ledger, key, lang, opts);
    let mut claims: Vec<ClaimVerdict> = parsed
        .claims
        .into_iter()
        .map(|claim| {
            let verdict = checker.verify(&claim);
            ClaimVerdict { claim, verdict }
        })
        .collect();
    if !parsed.compliant {
        for verdict in checker.untagged_screen(&parsed.prose) {
            claims.push(ClaimVerdict {
                claim: Claim::ungrounded(&verdict.detail),
                verdict,
            });
        }
    }
    let pairs: Vec<(bool, VerdictKind)> = claims
        .iter()
        .map(|c| (c.claim.checkable, c.verdict.kind))
        .collect();
    let trust = aggregate_trust(&pairs, &opts.policy);
    let checkable = pairs.iter().filter(|(c, _)| *c).count();
    let verified = pairs.iter().filter(|(c, k)| *c && k.is_verified()).count();
    let deterministic_failures = pairs.iter().filter(|(_, k)| k.is_deterministic_failure()).count();
    TrustReport {
        response_id: hex::encode(&sha256(response.as_bytes())[..8]),
        compliant: parsed.compliant,
        claims,
        trust,
        verified_fraction: VerifiedFraction {
            verified,
            checkable,
        },
        deterministic_failures,
        elapsed_ms: elapsed_ms(timer, start),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{FixedClock, NoTiming};
    use crate::receipt::{generate_receipt, FactExtractorConfig, SeededIds, ToolExecution};
    use serde_json::json;

    fn key() -> SigningKey {
        SigningKey::new(&[7u8; 32]).unwrap()
    }

    fn sign(ledger: &mut Ledger, ids: &mut SeededIds, tool: &str, input: serde_json::Value, output: serde_json::Value) -> Uuid {
        let raw = serde_json::to_vec(&output).unwrap();
        let exec = ToolExecution {
            tool_name: tool,
            input: &input,
            raw_output: &raw,
            output: &output,
            duration_ms: 5,
        };
        let r = generate_receipt(&exec, ids, &FixedClock(1_700_000_000_000), &key(), &FactExtractorConfig::with_defaults()).unwrap();
        let id = r.id;
        ledger.append(r).unwrap();
        id
    }

    fn email_ledger() -> (Ledger, Uuid, Uuid) {
        let mut l = Ledger::new(key().key_id());
        let mut ids = SeededIds::new(1);
        let a = sign(
            &mut l,
            &mut ids,
            "email_search",
            json!({"query": "inbox"}),
            json!({"results": [
                {"sender": "Alice", "subject": "Q3 report", "date": "2024-03-05"},
                {"sender": "Bob", "subject": "Lunch", "date": "2024-03-04"},
                {"sender": "Carol", "subject": "Trip", "date": "2024-03-03"}
            ]}),
        );
        let b = sign(&mut l, &mut ids, "calendar_list", json!({"day": "today"}), json!({"results": []}));
        (l, a, b)
    }

    fn claim(text: &str, p: Pramana, ev: Option<Uuid>) -> Claim {
        Claim {
            text: text.into(),
            source_type: p,
            evidence: ev.map(|u| u.to_string()),
            checkable: p != Pramana::Ungrounded,
            asserts: None,
            premises: None,
            cited_urls: crate::phrases::extract_urls(text),
        }
    }

    fn check(c: &Claim, l: &Ledger) -> VerdictKind {
        verify_claim(c, l, &key(), Lang::En, &VerifyOptions::default()).kind
    }

    #[test]
    fn count_checks() {
        let (l, a, _) = email_ledger();
        assert_eq!(check(&claim("You have 3 emails", Pramana::Pratyaksha, Some(a)), &l), VerdictKind::Verified);
        assert_eq!(check(&claim("You have 4 emails", Pramana::Pratyaksha, Some(a)), &l), VerdictKind::CountMismatch);
        let mut c = claim("Several emails arrived", Pramana::Pratyaksha, Some(a));
        c.asserts = Some([("count".to_string(), "three".to_string())].into());
        assert_eq!(check(&c, &l), VerdictKind::Verified);
    }

    #[test]
    fn fabricated_and_tampered() {
        let (mut l, a, _) = email_ledger();
        let ghost = Uuid::from_u128(42);
        for p in Pramana::ALL {
            assert_eq!(check(&claim("x", p, Some(ghost)), &l), VerdictKind::FabricatedToolCall);
        }
        let mut forged = l.get(&a).unwrap().clone();
        forged.id = Uuid::from_u128(43);
        l.append(forged).unwrap();
        assert_eq!(
            check(&claim("You have 3 emails", Pramana::Pratyaksha, Some(Uuid::from_u128(43))), &l),
            VerdictKind::SignatureInvalid
        );
    }

    #[test]
    fn absence() {
        let (l, a, b) = email_ledger();
        assert_eq!(check(&claim("No meetings today", Pramana::Abhava, Some(b)), &l), VerdictKind::Verified);
        assert_eq!(check(&claim("No emails", Pramana::Abhava, Some(a)), &l), VerdictKind::FalseAbsence);
        assert_eq!(check(&claim("No emails were found", Pramana::Pratyaksha, Some(a)), &l), VerdictKind::FalseAbsence);
    }

    #[test]
    fn facts_and_inference() {
        let (l, a, _) = email_ledger();
        let mut c = claim("Latest is from Alice", Pramana::Pratyaksha, Some(a));
        c.asserts = Some([("sender".to_string(), "alice".to_string())].into());
        assert_eq!(check(&c, &l), VerdictKind::Verified);
        c.asserts = Some([("sender".to_string(), "Mallory".to_string())].into());
        assert_eq!(check(&c, &l), VerdictKind::FactMismatch);
        c.asserts = Some([("urgency".to_string(), "high".to_string())].into());
        assert_eq!(check(&c, &l), VerdictKind::FactMismatch);

        let mut inf = claim("Alice probably needs a reply", Pramana::Anumana, Some(a));
        assert_eq!(check(&inf, &l), VerdictKind::PremisesVerified);
        inf.premises = Some(vec!["Q3 report".into()]);
        assert_eq!(check(&inf, &l), VerdictKind::PremisesVerified);
        inf.premises = Some(vec!["budget freeze".into()]);
        assert_eq!(check(&inf, &l), VerdictKind::Unverifiable);
    }

    #[test]
    fn testimony() {
        let (mut l, _, _) = email_ledger();
        let mut ids = SeededIds::new(9);
        sign(
            &mut l,
            &mut ids,
            "web_fetch",
            json!({"url": "https://www.reuters.com/markets/a"}),
            json!({"title": "Rates", "publisher": "Reuters", "status": 200}),
        );
        let ok = claim("Per https://www.reuters.com/markets/a/ rates rise", Pramana::Sabda, None);
        assert_eq!(check(&ok, &l), VerdictKind::Verified);
        let bad = claim("Per https://example.org/made-up rates rise", Pramana::Sabda, None);
        assert_eq!(check(&bad, &l), VerdictKind::SourceUnverified);
        assert_eq!(check(&claim("Experts agree", Pramana::Sabda, None), &l), VerdictKind::Unverifiable);
    }

    #[test]
    fn comparison() {
        let mut l = Ledger::new(key().key_id());
        let mut ids = SeededIds::new(3);
        sign(&mut l, &mut ids, "stock_quote", json!({"symbol": "ACME"}), json!({"symbol": "ACME", "close": 150.25, "change_pct": 1.2, "date": "2024-03-05"}));
        sign(&mut l, &mut ids, "stock_quote", json!({"symbol": "INIT"}), json!({"symbol": "INIT", "close": 98.5, "change_pct": -0.4, "date": "2024-03-05"}));
        let mut c = claim("ACME closed higher than INIT", Pramana::Upamana, None);
        c.premises = Some(vec!["150.25".into(), "98.5".into()]);
        assert_eq!(check(&c, &l), VerdictKind::PremisesVerified);
        c.text = "ACME closed lower than INIT".into();
        assert_eq!(check(&c, &l), VerdictKind::FactMismatch);
        c.premises = Some(vec!["150.25".into()]);
        assert_eq!(check(&c, &l), VerdictKind::Unverifiable);
    }

    #[test]
    fn trust_levels() {
        let p = TrustPolicy::default();
        use VerdictKind::*;
        assert_eq!(aggregate_trust(&[], &p), TrustLevel::Ungrounded);
        assert_eq!(aggregate_trust(&[(true, Verified); 3], &p), TrustLevel::FullyVerified);
        let four_one = [(true, Verified), (true, Verified), (true, PremisesVerified), (true, Verified), (true, Unverifiable)];
        assert_eq!(aggregate_trust(&four_one, &p), TrustLevel::MostlyVerified);
        assert_eq!(aggregate_trust(&[(true, Verified), (true, Unverifiable)], &p), TrustLevel::Partial);
        assert_eq!(aggregate_trust(&[(true, Verified), (false, CountMismatch)], &p), TrustLevel::Unreliable);
        assert!(TrustLevel::FullyVerified > TrustLevel::Partial);
        assert_eq!(TrustLevel::Ungrounded.partial_cmp(&TrustLevel::Unreliable), None);
    }

    #[test]
    fn untagged_responses_are_screened() {
        let (l, _, _) = email_ledger();
        let r = verify_response("You have 7 emails.", &l, &key(), Lang::En, &VerifyOptions::default(), &NoTiming);
        assert!(!r.compliant);
        assert_eq!(r.trust, TrustLevel::Unreliable);
        let r = verify_response("You have 3 emails.", &l, &key(), Lang::En, &VerifyOptions::default(), &NoTiming);
        assert_eq!(r.trust, TrustLevel::Ungrounded);
    }
}
