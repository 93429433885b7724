//! Execution lane: data-parallel with rayon when the `parallel` feature
//! is enabled, plain sequential iteration otherwise.
//!
//! Both lanes are bit-identical by construction. Order-preserving maps
//! compute each element independently, and every reduction runs over
//! fixed-size chunks folded in chunk-index order, so the result never
//! depends on thread count or scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk size for chunked reductions. Fixed (not derived from thread
/// count) so partial sums combine in the same order on every run.
pub(crate) const REDUCE_CHUNK: usize = 256;

/// Order-preserving map over a slice.
#[cfg(feature = "parallel")]
pub(crate) fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Order-preserving map over a slice.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Order-preserving map over an index range.
#[cfg(feature = "parallel")]
pub(crate) fn map_indices<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// [`map_indices`], but stays on the calling thread when the job count
/// is too small to amortize dispatch. Output is identical either way;
/// only the scheduling changes. Used in per-iteration training loops
/// where `n` is the (often tiny) chunk count.
#[cfg(feature = "parallel")]
pub(crate) fn map_indices_min<R, F>(n: usize, min_jobs: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    if n < min_jobs {
        (0..n).map(f).collect()
    } else {
        (0..n).into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices_min<R, F>(n: usize, _min_jobs: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// Order-preserving map over an index range.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// Name of the active lane, used by benchmarks to tag their reports.
pub fn lane() -> &'static str {
    #[cfg(feature = "parallel")]
    {
        "parallel"
    }
    #[cfg(not(feature = "parallel"))]
    {
        "sequential"
    }
}
