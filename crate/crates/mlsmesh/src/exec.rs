use std::ops::Range;

use mlsmesh_core::exec::split_even;
use mlsmesh_core::Executor;
use rayon::prelude::*;

/// Chunks handed to each worker thread; more than one evens out the load
/// when chunk costs differ.
const CHUNKS_PER_THREAD: usize = 4;

/// Rayon-backed executor with a private thread pool.
///
/// Outputs are concatenated in chunk order, so results are identical to
/// [`mlsmesh_core::Sequential`] for any thread count.
pub struct Parallel {
    pool: rayon::ThreadPool,
    threads: usize,
}

impl Parallel {
    /// `threads == 0` uses one thread per available core.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let threads = if threads == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { threads };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Parallel { pool, threads })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl Executor for Parallel {
    fn map_chunks<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> Vec<T> + Sync + Send,
    {
        if self.threads == 1 || n < 2 {
            return f(0..n);
        }
        let chunks = split_even(n, self.threads * CHUNKS_PER_THREAD);
        let parts: Vec<Vec<T>> = self.pool.install(|| chunks.into_par_iter().map(&f).collect());
        parts.into_iter().flatten().collect()
    }
}
