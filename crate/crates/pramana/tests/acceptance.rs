//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use std::io::Write as _;
use std::process::Command;
use std::time::Instant;

use pramana::bench::run_parallel;
use pramana::time::Stopwatch;
use pramana_core::bench::{generate_deep_corpus, generate_scenarios, BenchReport, Detector, GenConfig, HallucinationType};
use pramana_core::clock::FixedClock;
use pramana_core::crosscheck::{cross_source_check, refetch_urls, FixtureFetcher, KeyFact, Outcome};
use pramana_core::engine::{aggregate_trust, TrustPolicy, VerdictKind};
use pramana_core::receipt::{FactExtractorConfig, SeededIds, ToolExecution};
use pramana_core::{
    generate_receipt, verify_receipt_signature, verify_response, Constitution, Lang, Ledger, SigningKey, ToolReceipt,
    TrustLevel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use uuid::Uuid;

const SEED: u64 = 2024;

struct Check {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Check {
    Check { pass, detail: detail.into() }
}

fn key() -> SigningKey {
    SigningKey::new(&[0x5a; 32]).unwrap()
}

fn mint(ids: &mut SeededIds, tool: &str, input: Value, output: Value, key: &SigningKey) -> ToolReceipt {
    let raw = serde_json::to_vec(&output).unwrap();
    let exec = ToolExecution {
        tool_name: tool,
        input: &input,
        raw_output: &raw,
        output: &output,
        duration_ms: 40,
    };
    generate_receipt(&exec, ids, &FixedClock(1_708_300_000_000), key, &FactExtractorConfig::with_defaults()).unwrap()
}

fn fixture_receipts(key: &SigningKey) -> Vec<ToolReceipt> {
    let mut ids = SeededIds::new(5);
    vec![
        mint(
            &mut ids,
            "email_search",
            json!({"query": "from:alice"}),
            json!({"results": [
                {"sender": "Alice", "subject": "Deadline update", "date": "2024-02-19"},
                {"sender": "Alice", "subject": "Slides", "date": "2024-02-18"}
            ]}),
            key,
        ),
        mint(&mut ids, "stock_quote", json!({"symbol": "ACME"}), json!({"symbol": "ACME", "close": 148.5, "change_pct": 1.2, "date": "2024-02-19"}), key),
        mint(
            &mut ids,
            "web_fetch",
            json!({"url": "https://example.com/a"}),
            json!({"title": "Example", "publisher": "Example Org", "status": 200}),
            key,
        ),
    ]
}

/// Changes one byte of one signed field; never a no-op.
fn mutate(r: &mut ToolReceipt, field: usize, pos: usize, delta: u8) {
    let printable = |b: u8| b' ' + ((b.saturating_sub(b' ') + delta % 94 + 1) % 95);
    match field {
        0 => {
            let mut b = *r.id.as_bytes();
            b[pos % 16] ^= delta;
            r.id = Uuid::from_bytes(b);
        }
        1 => {
            let mut b = r.tool_name.clone().into_bytes();
            let i = pos % b.len();
            b[i] = printable(b[i]);
            r.tool_name = String::from_utf8(b).unwrap();
        }
        2 => r.input_hash[pos % 32] ^= delta,
        3 => r.output_hash[pos % 32] ^= delta,
        4 => r.result_count ^= u64::from(delta) << (8 * (pos % 8)),
        5 => {
            let k = r.facts.keys().nth(pos % r.facts.len()).unwrap().clone();
            let v = r.facts.get_mut(&k).unwrap();
            let mut b = std::mem::take(v).into_bytes();
            let i = pos % b.len();
            b[i] = printable(b[i]);
            *v = String::from_utf8(b).unwrap();
        }
        6 => r.timestamp_ms ^= i64::from(delta) << (8 * (pos % 7)),
        7 => r.duration_ms ^= u64::from(delta) << (8 * (pos % 8)),
        _ => r.signature[pos % 32] ^= delta,
    }
}

fn c1_tamper() -> Check {
    let key = key();
    let receipts = fixture_receipts(&key);
    assert!(receipts.iter().all(|r| verify_receipt_signature(r, &key)));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let mut accepted = 0;
    for i in 0..1000 {
        let mut r = receipts[i % receipts.len()].clone();
        mutate(&mut r, i % 9, rng.gen(), rng.gen_range(1..=255));
        assert_ne!(r, receipts[i % receipts.len()]);
        accepted += verify_receipt_signature(&r, &key) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(accepted == 0 && secs < 5.0, format!("1000 mutations over 9 fields, {accepted} accepted, {secs:.2} s"))
}

fn desk_report() -> BenchReport {
    let corpus = generate_scenarios(&GenConfig::desk(SEED)).unwrap();
    assert_eq!(corpus.len(), 360);
    run_parallel(&corpus, Detector::Engine, &Constitution::default(), &key(), 0).unwrap()
}

fn pct(hits: usize, total: usize) -> f64 {
    100.0 * hits as f64 / total as f64
}

fn c2_structural(r: &BenchReport) -> Check {
    let structural = [
        HallucinationType::FabricatedToolCall,
        HallucinationType::CountMismatch,
        HallucinationType::FalseAbsence,
        HallucinationType::FactMismatch,
        HallucinationType::SourceFabrication,
    ];
    let rows: Vec<String> = r
        .per_type
        .iter()
        .filter(|t| structural.contains(&t.kind))
        .map(|t| format!("{} {}/{}", t.kind.name(), t.overall.hits, t.overall.total))
        .collect();
    let pass = r
        .per_type
        .iter()
        .filter(|t| structural.contains(&t.kind))
        .all(|t| t.overall.total == 40 && t.overall.hits == 40);
    outcome(pass && rows.len() == 5, rows.join(", "))
}

fn c3_inference(r: &BenchReport) -> Check {
    let row = r.per_type.iter().find(|t| t.kind == HallucinationType::InferenceAsFact).unwrap();
    let p = pct(row.overall.hits, row.overall.total);
    outcome(p >= 80.0, format!("{p:.1}% ({}/{}), floor 80%", row.overall.hits, row.overall.total))
}

fn c4_fpr(r: &BenchReport) -> Check {
    let f = r.false_positives;
    let p = pct(f.hits, f.total);
    outcome(f.total == 120 && p <= 4.0, format!("{p:.1}% ({}/{}), ceiling 4%", f.hits, f.total))
}

fn c6_languages(r: &BenchReport) -> Check {
    let rates: Vec<f64> = r.per_lang.iter().map(|x| pct(x.hits, x.total)).collect();
    let spread = rates.iter().cloned().fold(f64::MIN, f64::max) - rates.iter().cloned().fold(f64::MAX, f64::min);
    let shown: Vec<String> = Lang::ALL.iter().zip(&rates).map(|(l, v)| format!("{} {v:.1}%", l.code())).collect();
    outcome(spread <= 5.0, format!("{}, spread {spread:.1} pts", shown.join(" ")))
}

/// 100 receipts and a 50-claim response citing them.
fn latency_workload(key: &SigningKey) -> (Ledger, String) {
    let mut ids = SeededIds::new(77);
    let mut ledger = Ledger::new(key.key_id());
    let mut entries = Vec::new();
    for i in 0..100u64 {
        let n = (i % 5) as usize;
        let r = if i % 2 == 0 {
            let results: Vec<Value> = (0..n)
                .map(|j| json!({"sender": format!("Sender{i}"), "subject": format!("Topic {j}"), "date": "2024-02-19"}))
                .collect();
            mint(&mut ids, "email_search", json!({"query": format!("q{i}")}), json!({"results": results}), key)
        } else {
            let close = 100.0 + i as f64;
            mint(&mut ids, "stock_quote", json!({"symbol": format!("S{i}")}), json!({"symbol": format!("S{i}"), "close": close}), key)
        };
        if entries.len() < 50 {
            let e = if r.tool_name == "email_search" && n == 0 {
                json!({"claim": "No emails were found.", "source_type": "absence", "evidence": r.id.to_string()})
            } else if r.tool_name == "email_search" {
                json!({"claim": format!("Sender{i} sent you {n} emails."), "source_type": "tool_output",
                       "evidence": r.id.to_string(), "asserts": {"count": n.to_string(), "sender": format!("Sender{i}")}})
            } else {
                json!({"claim": format!("S{i} closed at {}.", 100 + i), "source_type": "tool_output",
                       "evidence": r.id.to_string(), "asserts": {"close": (100 + i).to_string()}})
            };
            entries.push(e);
        }
        ledger.append(r).unwrap();
    }
    let response = format!(
        "Here is your summary.\n---VERIFICATION---\n{}\n---END VERIFICATION---\n",
        serde_json::to_string_pretty(&entries).unwrap()
    );
    (ledger, response)
}

fn c5_latency() -> Check {
    let key = key();
    let (ledger, response) = latency_workload(&key);
    let opts = Constitution::default().verify_options();
    let first = verify_response(&response, &ledger, &key, Lang::En, &opts, &Stopwatch);
    assert_eq!(first.claims.len(), 50);
    assert_eq!(first.trust, TrustLevel::FullyVerified, "{:?}", first.verdict_kinds().collect::<Vec<_>>());
    let mut samples: Vec<f64> = (0..1000)
        .map(|_| verify_response(&response, &ledger, &key, Lang::En, &opts, &Stopwatch).elapsed_ms)
        .collect();
    samples.sort_by(f64::total_cmp);
    let median = (samples[499] + samples[500]) / 2.0;
    outcome(
        median <= 15.0,
        format!("median {median:.3} ms, max {:.3} ms over 1000 runs (50 claims, 100 receipts)", samples[999]),
    )
}

fn c7_refetch() -> Check {
    let corpus = generate_deep_corpus(SEED, 50, 20);
    let caught = |fabricated: bool| {
        corpus
            .cases
            .iter()
            .filter(|c| c.fabricated == fabricated)
            .filter(|c| {
                refetch_urls(&c.output.cited_urls, &corpus.fixtures, 5000)
                    .iter()
                    .any(|f| f.outcome == Outcome::Flagged)
            })
            .count()
    };
    let hits = caught(true);
    let clean_flagged = caught(false);
    let p = pct(hits, 20);
    outcome(
        corpus.cases.iter().filter(|c| c.fabricated).count() == 20 && p >= 78.4,
        format!("{hits}/20 fabrications flagged ({p:.1}%, floor 78.4%), {clean_flagged}/30 clean outputs flagged"),
    )
}

fn c8_cross_source() -> Check {
    let mut fx = FixtureFetcher::default();
    fx.sources.insert("acme_close".into(), 148.50);
    let facts = [KeyFact {
        name: "close".into(),
        claimed: 150.0,
        query_id: "acme_close".into(),
    }];
    let f = cross_source_check(&facts, &fx, 0.01);
    outcome(f.len() == 1 && f[0].outcome == Outcome::Flagged, format!("150 vs 148.50 at rel_tol 0.01: {}", f[0].outcome))
}

fn c9_calibration() -> Check {
    let mut cfg = GenConfig::full_scale(SEED);
    cfg.tool_error_rate = 0.01;
    let corpus = generate_scenarios(&cfg).unwrap();
    let r = run_parallel(&corpus, Detector::Engine, &Constitution::default(), &key(), 0).unwrap();
    let cal = r.calibration.unwrap();
    let fully = cal.rows.iter().find(|row| row.level == TrustLevel::FullyVerified).unwrap();
    let rows: Vec<String> = cal
        .rows
        .iter()
        .filter(|row| row.level != TrustLevel::Ungrounded)
        .map(|row| format!("{} {}/{}", row.level.name(), row.all_correct, row.responses))
        .collect();
    let f = fully.fraction.unwrap_or(0.0) * 100.0;
    outcome(
        cal.monotone && f >= 98.0,
        format!("{} scenarios; {}; monotone {}; FullyVerified {f:.1}%", corpus.len(), rows.join(", "), cal.monotone),
    )
}

fn c10_determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_pramana");
    let mut corpora = Vec::new();
    let mut reports = Vec::new();
    for run in 0..2 {
        let corpus = dir.path().join(format!("corpus{run}.jsonl"));
        let report = dir.path().join(format!("report{run}.json"));
        let gen = Command::new(bin)
            .args(["bench", "gen", "--seed", "7", "--out"])
            .arg(&corpus)
            .output()
            .unwrap();
        assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
        let jobs = if run == 0 { "1" } else { "4" };
        let out = Command::new(bin)
            .args(["bench", "run", "--seed", "7", "--jobs", jobs, "--corpus"])
            .arg(&corpus)
            .arg("--out")
            .arg(&report)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        corpora.push(std::fs::read(&corpus).unwrap());
        let r: BenchReport = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
        reports.push(serde_json::to_string(&r.without_latency()).unwrap());
    }
    let same_corpus = corpora[0] == corpora[1];
    let same_report = reports[0] == reports[1];
    outcome(
        same_corpus && same_report,
        format!("corpus identical: {same_corpus} ({} bytes), report identical modulo latency: {same_report}", corpora[0].len()),
    )
}

/// The rule written out directly, with thresholds as exact fractions.
fn oracle(set: &[(bool, usize)], mostly: (usize, usize), partial: (usize, usize)) -> TrustLevel {
    const FAILURES: [&str; 5] = ["FabricatedToolCall", "CountMismatch", "FactMismatch", "FalseAbsence", "SignatureInvalid"];
    const VERIFIED: [&str; 2] = ["Verified", "PremisesVerified"];
    let name = |k: usize| format!("{:?}", VerdictKind::ALL[k]);
    if set.iter().any(|&(_, k)| FAILURES.contains(&name(k).as_str())) {
        return TrustLevel::Unreliable;
    }
    let checkable = set.iter().filter(|(c, _)| *c).count();
    if checkable == 0 {
        return TrustLevel::Ungrounded;
    }
    let verified = set.iter().filter(|&&(c, k)| c && VERIFIED.contains(&name(k).as_str())).count();
    if verified == checkable {
        TrustLevel::FullyVerified
    } else if verified * mostly.1 >= mostly.0 * checkable {
        TrustLevel::MostlyVerified
    } else if verified * partial.1 >= partial.0 * checkable {
        TrustLevel::Partial
    } else {
        TrustLevel::Unreliable
    }
}

fn multisets(symbols: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for m in &frontier {
            let from = m.last().copied().unwrap_or(0);
            for s in from..symbols {
                let mut m2: Vec<usize> = m.clone();
                m2.push(s);
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn c11_aggregation() -> Check {
    let start = Instant::now();
    let symbols = 2 * VerdictKind::ALL.len();
    let sets = multisets(symbols, 5);
    let policies = [((4, 5), (1, 2)), ((3, 4), (1, 2)), ((2, 3), (3, 5)), ((1, 1), (1, 2)), ((1, 2), (1, 2))];
    let mut mismatches = 0;
    let mut checked = 0;
    for &(mostly, partial) in &policies {
        let policy = TrustPolicy::new(mostly.0 as f64 / mostly.1 as f64, partial.0 as f64 / partial.1 as f64).unwrap();
        for m in &sets {
            let set: Vec<(bool, usize)> = m.iter().map(|&s| (s % 2 == 0, s / 2)).collect();
            let engine: Vec<(bool, VerdictKind)> = set.iter().map(|&(c, k)| (c, VerdictKind::ALL[k])).collect();
            checked += 1;
            mismatches += (aggregate_trust(&engine, &policy) != oracle(&set, mostly, partial)) as usize;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < 1.0,
        format!("{} multisets x {} policies = {checked} cases, {mismatches} mismatches, {secs:.2} s", sets.len(), policies.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let desk = desk_report();
    let results = [
        ("1 tamper evidence", c1_tamper()),
        ("2 structural detection", c2_structural(&desk)),
        ("3 inference-as-fact detection", c3_inference(&desk)),
        ("4 false positive rate", c4_fpr(&desk)),
        ("5 verification latency", c5_latency()),
        ("6 language stability", c6_languages(&desk)),
        ("7 URL re-fetch", c7_refetch()),
        ("8 cross-source example", c8_cross_source()),
        ("9 calibration", c9_calibration()),
        ("10 determinism", c10_determinism()),
        ("11 aggregation oracle", c11_aggregation()),
    ];
    // write past the test harness capture so the lines always show
    let mut out = std::io::stdout().lock();
    for (name, r) in &results {
        writeln!(out, "{} criterion {name}: {}", if r.pass { "PASS" } else { "FAIL" }, r.detail).unwrap();
    }
    drop(out);
    let failed: Vec<&str> = results.iter().filter(|(_, r)| !r.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
