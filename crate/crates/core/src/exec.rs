//! Chunked execution of independent work items.
//!
//! Every parallelisable stage splits its domain (scanlines, lattice rows,
//! edge indices) into contiguous chunks and concatenates the chunk outputs in
//! chunk order, so results never depend on the executor.

use alloc::vec::Vec;
use core::ops::Range;

pub trait Executor: Sync {
    /// Runs `f` over a partition of `0..n` into contiguous ranges and returns
    /// the outputs concatenated in range order.
    fn map_chunks<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> Vec<T> + Sync + Send;
}

/// Runs every chunk on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_chunks<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> Vec<T> + Sync + Send,
    {
        f(0..n)
    }
}

/// Splits `0..n` into at most `parts` near-equal contiguous ranges.
pub fn split_even(n: usize, parts: usize) -> Vec<Range<usize>> {
    let parts = parts.clamp(1, n.max(1));
    let base = n / parts;
    let extra = n % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for i in 0..parts {
        let len = base + usize::from(i < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}
