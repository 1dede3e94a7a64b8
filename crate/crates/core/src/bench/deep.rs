//! Fixture corpus of autonomous-agent outputs for the cross-check module.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::crosscheck::{
    CitedUrl, Computation, DatedItem, DeepAgentOutput, FieldRule, FixtureFetcher, FixtureResponse, KeyFact, Schema,
    TemporalOrdering, TypeTag,
};

use super::{HEADLINES, SITES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeepCase {
    pub id: String,
    pub output: DeepAgentOutput,
    /// One cited URL was fabricated (never existed, or its excerpt is not on
    /// the page).
    pub fabricated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeepCorpus {
    pub now_ms: i64,
    pub cases: Vec<DeepCase>,
    pub fixtures: FixtureFetcher,
}

/// 2024-06-01T00:00:00Z.
const NOW_MS: i64 = 1_717_200_000_000;

const SENTENCES: [&str; 6] = [
    "Officials said the decision followed months of review",
    "The figures were published in the quarterly bulletin",
    "Analysts described the change as largely expected",
    "The report cites data collected over three years",
    "Local groups welcomed the announcement on Tuesday",
    "The agency plans a follow-up assessment next year",
];

/// `n` outputs, `fabricated` of which cite one fabricated URL. Half of the
/// fabrications point at pages that do not exist; the other half quote text
/// that is not on the real page.
pub fn generate_deep_corpus(seed: u64, n: usize, fabricated: usize) -> DeepCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fixtures = FixtureFetcher::default();
    let mut picks: Vec<usize> = (0..n).collect();
    for i in (1..picks.len()).rev() {
        let j = rng.gen_range(0..=i);
        picks.swap(i, j);
    }
    let fabricated_set: Vec<usize> = picks.into_iter().take(fabricated.min(n)).collect();
    let mut cases = Vec::with_capacity(n);
    for i in 0..n {
        let mut cited = Vec::new();
        for k in 0..2 {
            let (site, publisher) = SITES[rng.gen_range(0..SITES.len())];
            let headline = HEADLINES[rng.gen_range(0..HEADLINES.len())];
            let sentence = SENTENCES[rng.gen_range(0..SENTENCES.len())];
            let url = format!("https://www.{site}/report/{i}-{k}-{}", rng.gen_range(100..999));
            let body = format!("<html><h1>{headline}</h1><p>{sentence}, {publisher} reported.</p></html>");
            fixtures.urls.insert(
                url.clone(),
                FixtureResponse {
                    status: 200,
                    body,
                    latency_ms: rng.gen_range(5..200),
                },
            );
            cited.push(CitedUrl {
                url,
                excerpt: Some(format!("{sentence}, {publisher} reported")),
                digest: None,
            });
        }
        let is_fab = fabricated_set.contains(&i);
        if is_fab {
            let c = &mut cited[1];
            if fabricated_set.iter().position(|&x| x == i).unwrap_or(0) % 2 == 0 {
                fixtures.urls.remove(&c.url);
                c.url = format!("{}-archive", c.url);
            } else {
                c.excerpt = Some("the minister resigned after the vote".into());
            }
        }

        let a = rng.gen_range(100..10_000) as f64 / 100.0;
        let b = rng.gen_range(2..50) as f64;
        let total = rng.gen_range(5..500u64);
        let value = rng.gen_range(5_000..50_000) as f64 / 100.0;
        let source_id = format!("quote-{i}");
        fixtures.sources.insert(source_id.clone(), value);
        let published = format!("2024-05-{:02}", rng.gen_range(1..=14));
        let updated = format!("2024-05-{:02}T12:00:00Z", rng.gen_range(15..=31));
        cases.push(DeepCase {
            id: format!("deep-{i:03}"),
            output: DeepAgentOutput {
                result: json!({"title": HEADLINES[i % HEADLINES.len()], "total": total, "items": [{"name": "summary"}]}),
                schema: Some(Schema {
                    fields: vec![
                        FieldRule { path: "title".into(), kind: Some(TypeTag::String), min: None, max: None, required: true },
                        FieldRule { path: "total".into(), kind: Some(TypeTag::Integer), min: Some(0.0), max: None, required: true },
                        FieldRule { path: "items.0.name".into(), kind: Some(TypeTag::String), min: None, max: None, required: true },
                    ],
                }),
                cited_urls: cited,
                computations: vec![Computation {
                    expr: format!("{a} * {b}"),
                    claimed: a * b,
                }],
                dated_items: vec![
                    DatedItem { label: "published".into(), timestamp: published },
                    DatedItem { label: "updated".into(), timestamp: updated },
                ],
                orderings: vec![TemporalOrdering { before: "published".into(), after: "updated".into() }],
                key_facts: vec![KeyFact {
                    name: "price".into(),
                    claimed: value,
                    query_id: source_id,
                }],
            },
            fabricated: is_fab,
        });
    }
    DeepCorpus {
        now_ms: NOW_MS,
        cases,
        fixtures,
    }
}
