//! Fetchers for cross-checking: fixture files and live HTTP.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::time::Duration;

use pramana_core::crosscheck::{FetchOutcome, Fetcher, FixtureFetcher, FixtureResponse};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FixtureDoc {
    Full {
        urls: BTreeMap<String, FixtureResponse>,
        #[serde(default)]
        sources: BTreeMap<String, f64>,
    },
    Urls(BTreeMap<String, FixtureResponse>),
}

/// Accepts either `{"urls": {...}, "sources": {...}}` or a bare map from URL
/// to response.
pub fn parse_fixtures(text: &str) -> Result<FixtureFetcher, serde_json::Error> {
    Ok(match serde_json::from_str(text)? {
        FixtureDoc::Full { urls, sources } => FixtureFetcher { urls, sources },
        FixtureDoc::Urls(urls) => FixtureFetcher { urls, sources: BTreeMap::new() },
    })
}

pub fn read_fixtures(path: &Path) -> Result<FixtureFetcher, FixtureError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io { path: p.clone(), source })?;
    parse_fixtures(&text).map_err(|source| FixtureError::Parse { path: p, source })
}

/// HTTP GET through ureq. Key-number sources come from a fixture table since
/// there is no general live source for them.
pub struct LiveFetcher {
    pub sources: BTreeMap<String, f64>,
}

impl LiveFetcher {
    pub fn new(sources: BTreeMap<String, f64>) -> Self {
        LiveFetcher { sources }
    }
}

pub fn http_get(url: &str, timeout_ms: u64) -> FetchOutcome {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(timeout_ms)))
        .http_status_as_error(false)
        .build()
        .into();
    match agent.get(url).call() {
        Ok(mut resp) => {
            let status = resp.status().as_u16();
            match resp.body_mut().read_to_string() {
                Ok(body) => FetchOutcome::Response { status, body },
                Err(ureq::Error::Timeout(_)) => FetchOutcome::Timeout,
                Err(e) => FetchOutcome::Failed(e.to_string()),
            }
        }
        Err(ureq::Error::Timeout(_)) => FetchOutcome::Timeout,
        Err(e) => FetchOutcome::Failed(e.to_string()),
    }
}

impl Fetcher for LiveFetcher {
    fn fetch(&self, url: &str, timeout_ms: u64) -> FetchOutcome {
        http_get(url, timeout_ms)
    }

    fn query_source(&self, id: &str) -> Option<f64> {
        self.sources.get(id).copied()
    }
}

/// Answers from outcomes fetched ahead of time, so the URLs of one output
/// can be requested in parallel and the check itself stays sequential.
pub struct Prefetched {
    pages: HashMap<String, FetchOutcome>,
    sources: BTreeMap<String, f64>,
}

impl Prefetched {
    pub fn fetch_all(urls: &[String], timeout_ms: u64, sources: BTreeMap<String, f64>) -> Self {
        let pages = std::thread::scope(|s| {
            let handles: Vec<_> = urls
                .iter()
                .map(|u| s.spawn(move || (u.clone(), http_get(u, timeout_ms))))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("fetch thread panicked"))
                .collect()
        });
        Prefetched { pages, sources }
    }
}

impl Fetcher for Prefetched {
    fn fetch(&self, url: &str, timeout_ms: u64) -> FetchOutcome {
        self.pages.get(url).cloned().unwrap_or_else(|| http_get(url, timeout_ms))
    }

    fn query_source(&self, id: &str) -> Option<f64> {
        self.sources.get(id).copied()
    }
}
