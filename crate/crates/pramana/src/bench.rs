//! Parallel benchmark runs. Results are collected in corpus order, so the
//! report matches a sequential run apart from latency.

use pramana_core::bench::{evaluate_scenario, summarize, BenchReport, Detector, Scenario, ScenarioResult};
use pramana_core::{Constitution, SigningKey};
use rayon::prelude::*;

use crate::time::Stopwatch;

/// `jobs == 0` uses one worker per CPU.
pub fn run_parallel(
    scenarios: &[Scenario],
    detector: Detector,
    c: &Constitution,
    key: &SigningKey,
    jobs: usize,
) -> Result<BenchReport, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let results: Vec<ScenarioResult> = pool.install(|| {
        scenarios
            .par_iter()
            .map(|s| evaluate_scenario(s, detector, c, key, &Stopwatch))
            .collect()
    });
    Ok(summarize(detector, &results))
}
