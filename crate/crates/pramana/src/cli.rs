//! The `pramana` command line.
//!
//! Exit codes: 0 pass, 1 warn (or flagged cross-check), 2 block (or an
//! invalid receipt signature), 3 usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pramana_core::bench::{generate_deep_corpus, generate_scenarios, Detector, GenConfig};
use pramana_core::crosscheck::{crosscheck, parse_timestamp_ms, DeepAgentOutput, Fetcher, Outcome, Strategy};
use pramana_core::receipt::{FactExtractorConfig, ToolExecution};
use pramana_core::{
    apply_policy, generate_receipt, verify_receipt_signature, verify_response, Action, Constitution, Lang,
};
use serde_json::{json, Value};
use uuid::Uuid;

use crate::bench::run_parallel;
use crate::constitution::read_constitution;
use crate::corpus::{read_corpus, write_corpus};
use crate::fetch::{read_fixtures, Prefetched};
use crate::keys::{bench_key, key_from_env, KeyLoadError, DEFAULT_KEY_ENV};
use crate::ledger_file::{append_receipt, read_ledger, receipt_line};
use crate::time::{Stopwatch, SystemClock};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_WARN: i32 = 1;
pub const EXIT_BLOCK: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser)]
#[command(name = "pramana", version, about = "Receipt-backed verification of agent responses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a response against a receipt ledger and apply the constitution.
    Verify(VerifyArgs),
    /// Sign, check or inspect tool receipts.
    #[command(subcommand)]
    Receipt(ReceiptCmd),
    /// Generate scenario corpora and score detectors.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Check an autonomous-agent output without receipts.
    Crosscheck(CrosscheckArgs),
}

#[derive(Args)]
struct KeyArg {
    /// Environment variable holding the 64-hex-character signing key.
    #[arg(long, default_value = DEFAULT_KEY_ENV)]
    key_env: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    response: PathBuf,
    #[arg(long)]
    ledger: PathBuf,
    #[arg(long)]
    constitution: Option<PathBuf>,
    #[arg(long, default_value = "en", value_parser = parse_lang)]
    lang: Lang,
    #[command(flatten)]
    key: KeyArg,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum ReceiptCmd {
    /// Sign one tool execution and print (or append) its receipt.
    Sign {
        #[arg(long)]
        tool: String,
        /// JSON file with the tool input.
        #[arg(long)]
        input: PathBuf,
        /// Raw tool output; parsed as JSON when possible.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        duration_ms: u64,
        /// Append the receipt to this ledger instead of printing it.
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[arg(long)]
        constitution: Option<PathBuf>,
        #[command(flatten)]
        key: KeyArg,
    },
    /// Check every signature in a ledger.
    Check {
        #[arg(long)]
        ledger: PathBuf,
        #[command(flatten)]
        key: KeyArg,
    },
    /// Print ledger entries without checking signatures.
    Inspect {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long)]
        id: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Desk,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Engine,
    Regex,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Generate a scenario corpus as JSON lines.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "desk")]
        scale: Scale,
        /// Fraction of fully grounded responses whose tool data is wrong.
        #[arg(long)]
        tool_error_rate: Option<f64>,
    },
    /// Score a detector against a corpus.
    Run {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "engine")]
        detector: DetectorArg,
        /// Seed for the session signing key.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Worker threads; 0 uses every CPU.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        constitution: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate autonomous-agent outputs and their fixture pages.
    GenDeep {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        fabricated: usize,
    },
}

#[derive(Args)]
struct CrosscheckArgs {
    /// JSON agent output.
    #[arg(long)]
    output: PathBuf,
    /// Fixture pages and sources; required unless --live.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Fetch cited URLs over the network.
    #[arg(long)]
    live: bool,
    /// Reference time, RFC 3339 or epoch milliseconds; defaults to now.
    #[arg(long)]
    now: Option<String>,
    #[arg(long)]
    constitution: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn parse_lang(s: &str) -> Result<Lang, String> {
    s.parse().map_err(|_| format!("unknown language {s:?}; expected en, hi, zh or es"))
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Receipt(c) => receipt(c),
        Command::Bench(c) => bench(c),
        Command::Crosscheck(a) => crosscheck_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn load_constitution(path: Option<&Path>) -> anyhow::Result<Constitution> {
    match path {
        Some(p) => read_constitution(p).with_context(|| format!("constitution {}", p.display())),
        None => Ok(Constitution::default()),
    }
}

fn action_code(a: Action) -> i32 {
    match a {
        Action::Pass => EXIT_PASS,
        Action::Warn => EXIT_WARN,
        Action::Block => EXIT_BLOCK,
    }
}

fn verify(a: VerifyArgs) -> anyhow::Result<i32> {
    let c = load_constitution(a.constitution.as_deref())?;
    let response = std::fs::read_to_string(&a.response)
        .with_context(|| format!("reading {}", a.response.display()))?;
    let (key, ledger) = match key_from_env(&a.key.key_env) {
        Ok(key) => {
            let ledger = read_ledger(&a.ledger, &key.key_id()).with_context(|| format!("ledger {}", a.ledger.display()))?;
            (key, ledger)
        }
        Err(KeyLoadError::Missing(var)) => {
            // an empty ledger needs no key: nothing can verify either way
            let ledger = read_ledger(&a.ledger, "none").with_context(|| format!("ledger {}", a.ledger.display()))?;
            if !ledger.is_empty() {
                bail!("signing key variable {var} is not set and the ledger has receipts");
            }
            (bench_key(0), ledger)
        }
        Err(e) => return Err(e.into()),
    };
    let report = verify_response(&response, &ledger, &key, a.lang, &c.verify_options(), &Stopwatch);
    let decision = apply_policy(&report, &c);
    let mut out = std::io::stdout().lock();
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({"decision": decision, "report": report}))?)?;
    } else {
        let f = report.verified_fraction;
        writeln!(out, "trust: {} ({}/{} checkable claims verified)", report.trust, f.verified, f.checkable)?;
        writeln!(out, "action: {}", decision.action.name())?;
        if !report.compliant {
            writeln!(out, "response has no verification block")?;
        }
        for (i, cv) in report.claims.iter().enumerate() {
            writeln!(
                out,
                "  {:>2}. {:?} [{:?}] {}",
                i + 1,
                cv.verdict.kind,
                cv.claim.source_type,
                cv.claim.text
            )?;
            if !cv.verdict.detail.is_empty() {
                writeln!(out, "      {}", cv.verdict.detail)?;
            }
        }
    }
    Ok(action_code(decision.action))
}

fn receipt(cmd: ReceiptCmd) -> anyhow::Result<i32> {
    match cmd {
        ReceiptCmd::Sign { tool, input, output, duration_ms, ledger, constitution, key } => {
            let key = key_from_env(&key.key_env)?;
            let facts: FactExtractorConfig = load_constitution(constitution.as_deref())?.facts;
            let input: Value = serde_json::from_str(
                &std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?,
            )
            .with_context(|| format!("{} is not JSON", input.display()))?;
            let raw = std::fs::read(&output).with_context(|| format!("reading {}", output.display()))?;
            let parsed: Value = serde_json::from_slice(&raw)
                .unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&raw).into_owned()));
            let exec = ToolExecution {
                tool_name: &tool,
                input: &input,
                raw_output: &raw,
                output: &parsed,
                duration_ms,
            };
            let mut ids = Uuid::new_v4;
            let r = generate_receipt(&exec, &mut ids, &SystemClock, &key, &facts)?;
            match ledger {
                Some(path) => {
                    // refuse to append to a ledger that does not parse
                    if path.exists() {
                        read_ledger(&path, &key.key_id()).with_context(|| format!("ledger {}", path.display()))?;
                    }
                    append_receipt(&path, &r).with_context(|| format!("appending to {}", path.display()))?;
                    println!("{}", r.id);
                }
                None => print!("{}", receipt_line(&r)),
            }
            Ok(EXIT_PASS)
        }
        ReceiptCmd::Check { ledger, key } => {
            let key = key_from_env(&key.key_env)?;
            let l = read_ledger(&ledger, &key.key_id()).with_context(|| format!("ledger {}", ledger.display()))?;
            let bad: Vec<_> = l.iter().filter(|r| !verify_receipt_signature(r, &key)).collect();
            for r in &bad {
                println!("INVALID {} {}", r.id, r.tool_name);
            }
            println!("{} receipts, {} invalid", l.len(), bad.len());
            Ok(if bad.is_empty() { EXIT_PASS } else { EXIT_BLOCK })
        }
        ReceiptCmd::Inspect { ledger, id } => {
            let l = read_ledger(&ledger, "unknown").with_context(|| format!("ledger {}", ledger.display()))?;
            let selected: Vec<_> = match &id {
                Some(id) => match l.lookup(id)? {
                    Some(r) => vec![r],
                    None => bail!("no receipt {id} in {}", ledger.display()),
                },
                None => l.iter().collect(),
            };
            for r in selected {
                println!(
                    "{}  {:<14} results={:<4} duration={}ms facts={}",
                    r.id,
                    r.tool_name,
                    r.result_count,
                    r.duration_ms,
                    serde_json::to_string(&r.facts)?
                );
            }
            Ok(EXIT_PASS)
        }
    }
}

fn bench(cmd: BenchCmd) -> anyhow::Result<i32> {
    match cmd {
        BenchCmd::Gen { out, seed, scale, tool_error_rate } => {
            let mut cfg = match scale {
                Scale::Desk => GenConfig::desk(seed),
                Scale::Full => GenConfig::full_scale(seed),
            };
            if let Some(r) = tool_error_rate {
                if !(0.0..=1.0).contains(&r) {
                    bail!("--tool-error-rate must lie in [0, 1]");
                }
                cfg.tool_error_rate = r;
            }
            let scenarios = generate_scenarios(&cfg)?;
            write_corpus(&out, &scenarios)?;
            println!("wrote {} scenarios to {}", scenarios.len(), out.display());
            Ok(EXIT_PASS)
        }
        BenchCmd::Run { corpus, detector, seed, jobs, constitution, json, out } => {
            let c = load_constitution(constitution.as_deref())?;
            let scenarios = read_corpus(&corpus)?;
            let detector = match detector {
                DetectorArg::Engine => Detector::Engine,
                DetectorArg::Regex => Detector::Regex,
            };
            let report = run_parallel(&scenarios, detector, &c, &bench_key(seed), jobs)?;
            let text = serde_json::to_string_pretty(&report)?;
            if let Some(path) = out {
                std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            if json {
                println!("{text}");
            } else {
                print!("{}", report.to_table());
            }
            Ok(EXIT_PASS)
        }
        BenchCmd::GenDeep { out, seed, n, fabricated } => {
            if fabricated > n {
                bail!("--fabricated must not exceed --n");
            }
            let corpus = generate_deep_corpus(seed, n, fabricated);
            std::fs::write(&out, serde_json::to_string_pretty(&corpus)?)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {n} outputs ({fabricated} fabricated) to {}", out.display());
            Ok(EXIT_PASS)
        }
    }
}

fn parse_now(text: &str) -> anyhow::Result<i64> {
    if let Ok(ms) = text.trim().parse::<i64>() {
        return Ok(ms);
    }
    parse_timestamp_ms(text).with_context(|| format!("--now {text:?} is neither a timestamp nor epoch milliseconds"))
}

fn crosscheck_cmd(a: CrosscheckArgs) -> anyhow::Result<i32> {
    let c = load_constitution(a.constitution.as_deref())?;
    let output: DeepAgentOutput = serde_json::from_str(
        &std::fs::read_to_string(&a.output).with_context(|| format!("reading {}", a.output.display()))?,
    )
    .with_context(|| format!("{} is not an agent output", a.output.display()))?;
    let now_ms = match &a.now {
        Some(t) => parse_now(t)?,
        None => pramana_core::clock::Clock::now_ms(&SystemClock),
    };
    let fixtures = match &a.fixtures {
        Some(p) => Some(read_fixtures(p)?),
        None if a.live => None,
        None => bail!("--fixtures is required without --live"),
    };
    let report = if a.live {
        let urls: Vec<String> = output.cited_urls.iter().map(|u| u.url.clone()).collect();
        let sources = fixtures.map(|f| f.sources).unwrap_or_default();
        let fetcher = Prefetched::fetch_all(&urls, c.crosscheck.fetch_timeout_ms, sources);
        crosscheck(&output, &fetcher as &dyn Fetcher, &c.crosscheck, now_ms, &Stopwatch)
    } else {
        let f = fixtures.expect("checked above");
        crosscheck(&output, &f, &c.crosscheck, now_ms, &Stopwatch)
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for f in &report.findings {
            println!("{:<13} {:<13} {}  {}", f.strategy.to_string(), f.outcome.to_string(), f.target, f.detail);
        }
        println!("{} findings, {} flagged, {} indeterminate", report.findings.len(), report.flagged, report.indeterminate);
    }
    if a.live {
        let unreachable = report
            .findings
            .iter()
            .filter(|f| f.strategy == Strategy::Refetch && f.outcome == Outcome::Indeterminate)
            .count();
        if unreachable > 0 {
            eprintln!("warning: {unreachable} cited URLs could not be fetched; their checks are indeterminate");
        }
    }
    Ok(if report.is_flagged() { EXIT_WARN } else { EXIT_PASS })
}
