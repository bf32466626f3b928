//! Thread-pool runtime for the codec.

use std::time::Instant;

use rayon::prelude::*;
use srgc_core::Runtime;

/// Runs per-unit work on a dedicated rayon pool and times stages with a
/// monotonic clock. Results are gathered in index order, so output does not
/// depend on the worker count.
pub struct ThreadPool {
    pool: rayon::ThreadPool,
    epoch: Instant,
}

impl ThreadPool {
    /// A pool of `threads` workers; 0 picks the number of available cores.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(ThreadPool { pool, epoch: Instant::now() })
    }
}

impl Runtime for ThreadPool {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..len).into_par_iter().map(f).collect())
    }

    fn now(&self) -> Option<f64> {
        Some(self.epoch.elapsed().as_secs_f64())
    }

    fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_in_index_order() {
        let pool = ThreadPool::new(4).unwrap();
        assert_eq!(pool.workers(), 4);
        let out = pool.map(1000, |i| i * i);
        assert!(out.iter().enumerate().all(|(i, &v)| v == i * i));
        assert!(pool.now().is_some());
    }
}
