//! Feature-gated data-parallel helpers.
//!
//! Work is always partitioned by index and written to per-index slots, so
//! results are bit-identical between the rayon and sequential builds and do
//! not depend on the thread schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..n` through `f`, in parallel when the `parallel` feature is on.
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential counterpart of [`map_collect`], kept unconditionally so the
/// benchmark suite can compare both paths in one build.
pub(crate) fn map_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
