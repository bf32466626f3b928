//! Execution hooks: how per-super-ray work is scheduled and how stage times
//! are measured. The core only ships a sequential runtime; the `srgc` crate
//! provides a thread pool.

use alloc::vec::Vec;

pub trait Runtime: Sync {
    /// Evaluates `f(0), ..., f(len - 1)` and returns the results in index
    /// order. Implementations may run the calls concurrently; the output must
    /// not depend on scheduling.
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;

    /// Monotonic clock in seconds, if available.
    fn now(&self) -> Option<f64> {
        None
    }

    fn workers(&self) -> usize {
        1
    }
}

/// Runs everything on the calling thread, without timing.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Runtime for Sequential {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}

/// Elapsed-time helper over [`Runtime::now`].
pub(crate) struct Stopwatch {
    last: Option<f64>,
}

impl Stopwatch {
    pub fn start<R: Runtime + ?Sized>(rt: &R) -> Self {
        Stopwatch { last: rt.now() }
    }

    /// Seconds since the previous lap (0 without a clock).
    pub fn lap<R: Runtime + ?Sized>(&mut self, rt: &R) -> f64 {
        let now = rt.now();
        let dt = match (self.last, now) {
            (Some(a), Some(b)) => (b - a).max(0.0),
            _ => 0.0,
        };
        self.last = now;
        dt
    }
}
