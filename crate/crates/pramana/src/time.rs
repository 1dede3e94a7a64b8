use std::sync::OnceLock;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use pramana_core::clock::{Clock, Monotonic};

/// Wall clock backed by `SystemTime`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> i64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as i64)
            .unwrap_or(0)
    }
}

/// Monotonic microseconds since the first use in this process.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stopwatch;

impl Monotonic for Stopwatch {
    fn now_us(&self) -> u64 {
        static ORIGIN: OnceLock<Instant> = OnceLock::new();
        ORIGIN.get_or_init(Instant::now).elapsed().as_micros() as u64
    }
}
