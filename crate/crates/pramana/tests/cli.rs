use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const KEY_HEX: &str = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";

fn pramana(args: &[&str], dir: &Path, key: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pramana"));
    cmd.args(args).current_dir(dir).env_remove("PRAMANA_RECEIPT_KEY");
    if let Some(k) = key {
        cmd.env("PRAMANA_RECEIPT_KEY", k);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

/// Signs one email search into `ledger.jsonl` and returns the receipt id.
fn signed_ledger(dir: &Path) -> String {
    std::fs::write(dir.join("in.json"), r#"{"query": "from:alice"}"#).unwrap();
    std::fs::write(
        dir.join("out.json"),
        r#"{"results": [{"sender": "Alice", "subject": "Deadline", "date": "2024-02-19"},
                        {"sender": "Alice", "subject": "Slides", "date": "2024-02-18"}]}"#,
    )
    .unwrap();
    let o = pramana(
        &["receipt", "sign", "--tool", "email_search", "--input", "in.json", "--output", "out.json", "--ledger", "ledger.jsonl"],
        dir,
        Some(KEY_HEX),
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    text(&o.stdout).trim().to_string()
}

fn response(id: &str, count: u32) -> String {
    format!(
        "Alice sent you {count} emails.\n---VERIFICATION---\n\
         - claim: Alice sent you {count} emails\n  source_type: tool_output\n  evidence: {id}\n  asserts: {{\"count\": \"{count}\"}}\n\
         ---END VERIFICATION---\n"
    )
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&pramana(&["--help"], dir.path(), None)), 0);
    assert_eq!(code(&pramana(&["--version"], dir.path(), None)), 0);
    assert_eq!(code(&pramana(&["bench", "run", "--help"], dir.path(), None)), 0);
}

#[test]
fn usage_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&pramana(&[], dir.path(), None)), 3);
    assert_eq!(code(&pramana(&["frobnicate"], dir.path(), None)), 3);
    assert_eq!(code(&pramana(&["verify", "--response", "x"], dir.path(), None)), 3);
    let o = pramana(&["verify", "--response", "missing.txt", "--ledger", "missing.jsonl", "--lang", "fr"], dir.path(), None);
    assert_eq!(code(&o), 3);
    assert!(text(&o.stderr).contains("unknown language"));
}

#[test]
fn verify_exit_codes_follow_the_action() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let id = signed_ledger(d);

    std::fs::write(d.join("good.txt"), response(&id, 2)).unwrap();
    let o = pramana(&["verify", "--response", "good.txt", "--ledger", "ledger.jsonl", "--json"], d, Some(KEY_HEX));
    assert_eq!(code(&o), 0, "{}{}", text(&o.stdout), text(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["trust"], "FullyVerified");
    assert_eq!(v["decision"]["action"], "pass");

    // standard mode warns on Unreliable
    std::fs::write(d.join("bad.txt"), response(&id, 5)).unwrap();
    let o = pramana(&["verify", "--response", "bad.txt", "--ledger", "ledger.jsonl"], d, Some(KEY_HEX));
    assert_eq!(code(&o), 1);
    assert!(text(&o.stdout).contains("CountMismatch"), "{}", text(&o.stdout));

    std::fs::write(d.join("paranoid.toml"), "mode = \"paranoid\"\n").unwrap();
    let o = pramana(
        &["verify", "--response", "bad.txt", "--ledger", "ledger.jsonl", "--constitution", "paranoid.toml"],
        d,
        Some(KEY_HEX),
    );
    assert_eq!(code(&o), 2);

    // a different key invalidates every receipt
    let other = "ff".repeat(32);
    let o = pramana(&["verify", "--response", "good.txt", "--ledger", "ledger.jsonl", "--json"], d, Some(&other));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["claims"][0]["verdict"]["kind"], "SignatureInvalid");
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_key_handling() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let id = signed_ledger(d);
    std::fs::write(d.join("r.txt"), response(&id, 2)).unwrap();
    let o = pramana(&["verify", "--response", "r.txt", "--ledger", "ledger.jsonl"], d, None);
    assert_eq!(code(&o), 3);
    assert!(text(&o.stderr).contains("PRAMANA_RECEIPT_KEY"), "{}", text(&o.stderr));

    let o = pramana(&["verify", "--response", "r.txt", "--ledger", "ledger.jsonl"], d, Some("abcd"));
    assert_eq!(code(&o), 3);

    // custom variable name
    let o = Command::new(env!("CARGO_BIN_EXE_pramana"))
        .args(["verify", "--response", "r.txt", "--ledger", "ledger.jsonl", "--key-env", "MY_KEY"])
        .current_dir(d)
        .env("MY_KEY", KEY_HEX)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));

    // an empty ledger needs no key; the untagged text is ungrounded
    std::fs::write(d.join("empty.jsonl"), "").unwrap();
    std::fs::write(d.join("plain.txt"), "The weather is nice today.").unwrap();
    let o = pramana(&["verify", "--response", "plain.txt", "--ledger", "empty.jsonl"], d, None);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert!(text(&o.stdout).contains("Ungrounded"));
}

#[test]
fn bad_constitution_reports_field_and_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    signed_ledger(d);
    std::fs::write(d.join("r.txt"), "hi").unwrap();
    std::fs::write(d.join("c.toml"), "[crosscheck]\nrel_tol = 0\n").unwrap();
    let o = pramana(
        &["verify", "--response", "r.txt", "--ledger", "ledger.jsonl", "--constitution", "c.toml"],
        d,
        Some(KEY_HEX),
    );
    assert_eq!(code(&o), 3);
    assert!(text(&o.stderr).contains("crosscheck.rel_tol"), "{}", text(&o.stderr));
}

#[test]
fn receipt_check_and_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let id = signed_ledger(d);
    signed_ledger(d);
    let o = pramana(&["receipt", "check", "--ledger", "ledger.jsonl"], d, Some(KEY_HEX));
    assert_eq!(code(&o), 0);
    assert!(text(&o.stdout).contains("2 receipts, 0 invalid"));

    let o = pramana(&["receipt", "inspect", "--ledger", "ledger.jsonl", "--id", &id], d, None);
    assert_eq!(code(&o), 0);
    assert!(text(&o.stdout).contains("results=2"), "{}", text(&o.stdout));
    let o = pramana(&["receipt", "inspect", "--ledger", "ledger.jsonl", "--id", "nope"], d, None);
    assert_eq!(code(&o), 3);

    // edit the first receipt's count in place
    let ledger = std::fs::read_to_string(d.join("ledger.jsonl")).unwrap();
    let tampered = ledger.replacen("\"result_count\":2", "\"result_count\":3", 1);
    assert_ne!(tampered, ledger);
    std::fs::write(d.join("ledger.jsonl"), tampered).unwrap();
    let o = pramana(&["receipt", "check", "--ledger", "ledger.jsonl"], d, Some(KEY_HEX));
    assert_eq!(code(&o), 2);
    assert!(text(&o.stdout).contains(&format!("INVALID {id}")));

    let o = pramana(&["receipt", "check", "--ledger", "ledger.jsonl"], d, None);
    assert_eq!(code(&o), 3);
}

#[test]
fn receipt_sign_prints_a_ledger_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("in.json"), r#"{"url": "https://example.com"}"#).unwrap();
    std::fs::write(d.join("page.html"), "<html>hi</html>").unwrap();
    let o = pramana(
        &["receipt", "sign", "--tool", "web_fetch", "--input", "in.json", "--output", "page.html"],
        d,
        Some(KEY_HEX),
    );
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tool_name"], "web_fetch");
    assert_eq!(v["facts"]["url"], "https://example.com");
}

fn crosscheck_files(d: &Path, claimed_close: f64) {
    let output = serde_json::json!({
        "result": {"title": "ACME"},
        "cited_urls": [{"url": "https://news.test/acme", "excerpt": "ACME shares rose"}],
        "computations": [{"expr": "148.5 * 2", "claimed": 297.0}],
        "dated_items": [{"label": "report", "timestamp": "2024-05-01T00:00:00Z"}],
        "key_facts": [{"name": "close", "claimed": claimed_close, "query_id": "acme_close"}]
    });
    std::fs::write(d.join("out.json"), output.to_string()).unwrap();
    std::fs::write(
        d.join("fx.json"),
        r#"{"urls": {"https://news.test/acme": {"body": "<p>ACME shares rose 2%.</p>"}}, "sources": {"acme_close": 148.5}}"#,
    )
    .unwrap();
}

#[test]
fn crosscheck_flags_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["crosscheck", "--output", "out.json", "--fixtures", "fx.json", "--now", "2024-06-01T00:00:00Z"];
    crosscheck_files(d, 148.5);
    let o = pramana(&args, d, None);
    assert_eq!(code(&o), 0, "{}", text(&o.stdout));
    crosscheck_files(d, 150.0);
    let o = pramana(&[&args[..], &["--json"]].concat(), d, None);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["flagged"], 1);
    let o = pramana(&["crosscheck", "--output", "out.json"], d, None);
    assert_eq!(code(&o), 3);
}

#[test]
fn live_crosscheck_without_network_is_indeterminate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // port 9 on loopback refuses connections
    let output = r#"{"cited_urls": [{"url": "http://127.0.0.1:9/page", "excerpt": "x"}]}"#;
    std::fs::write(d.join("out.json"), output).unwrap();
    let o = pramana(&["crosscheck", "--output", "out.json", "--live", "--json"], d, None);
    assert_eq!(code(&o), 0, "{}{}", text(&o.stdout), text(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["indeterminate"], 1);
    assert!(text(&o.stderr).contains("warning"));
}

#[test]
fn bench_gen_deep_then_crosscheck_a_case() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = pramana(&["bench", "gen-deep", "--out", "deep.json", "--n", "6", "--fabricated", "3"], d, None);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let corpus: Value = serde_json::from_str(&std::fs::read_to_string(d.join("deep.json")).unwrap()).unwrap();
    std::fs::write(d.join("fx.json"), corpus["fixtures"].to_string()).unwrap();
    let now = corpus["now_ms"].to_string();
    for case in corpus["cases"].as_array().unwrap() {
        std::fs::write(d.join("case.json"), case["output"].to_string()).unwrap();
        let o = pramana(&["crosscheck", "--output", "case.json", "--fixtures", "fx.json", "--now", &now], d, None);
        let expect = if case["fabricated"] == true { 1 } else { 0 };
        assert_eq!(code(&o), expect, "{}\n{}", case["id"], text(&o.stdout));
    }
    assert_eq!(code(&pramana(&["bench", "gen-deep", "--out", "x.json", "--n", "2", "--fabricated", "3"], d, None)), 3);
}

#[test]
fn bench_run_regex_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&pramana(&["bench", "gen", "--out", "c.jsonl", "--seed", "3"], d, None)), 0);
    let o = pramana(&["bench", "run", "--corpus", "c.jsonl", "--detector", "regex", "--json"], d, None);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["detector"], "regex");
    assert_eq!(v["scenarios"], 360);
    let o = pramana(&["bench", "gen", "--out", "c.jsonl", "--tool-error-rate", "2"], d, None);
    assert_eq!(code(&o), 3);
}
