//! Execution strategy for the data-parallel sweeps.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it every strategy runs sequentially. Results are always returned
//! in index order, so output never depends on the schedule.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `(0..n).map(f)` collected in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }
}

/// Runs `job` on a dedicated pool of `threads` workers, or on the global pool
/// when `threads` is `None`.
pub fn with_threads<R, F>(threads: Option<usize>, job: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match threads {
        Some(0) => Err(Error::InvalidConfig(
            "thread count must be at least 1".into(),
        )),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(job))
        }
        _ => Ok(job()),
    }
}
