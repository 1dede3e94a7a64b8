//! Injected time sources.

/// Wall-clock time in milliseconds since the Unix epoch.
pub trait Clock {
    fn now_ms(&self) -> i64;
}

/// Monotonic microsecond ticks, used only to measure elapsed time.
pub trait Monotonic {
    fn now_us(&self) -> u64;
}

/// A clock frozen at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedClock(pub i64);

impl Clock for FixedClock {
    fn now_ms(&self) -> i64 {
        self.0
    }
}

/// Always reports zero elapsed time. Used where timing is irrelevant or
/// unavailable.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTiming;

impl Monotonic for NoTiming {
    fn now_us(&self) -> u64 {
        0
    }
}

pub(crate) fn elapsed_ms(clock: &dyn Monotonic, start_us: u64) -> f64 {
    clock.now_us().saturating_sub(start_us) as f64 / 1000.0
}
