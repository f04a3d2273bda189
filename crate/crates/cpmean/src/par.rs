// SPDX-License-Identifier: MIT OR Apache-2.0

//! Order-preserving data-parallel maps.
//!
//! With the `parallel` feature these fan out over the rayon pool; without it
//! they are plain loops. Either way the output order matches the input order,
//! so reductions done afterwards are scheduling-independent.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
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

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Below this many items the sequential path is used even with the feature on;
/// spawning tasks for tiny grids costs more than it saves.
pub(crate) const MIN_PARALLEL_WORK: usize = 4096;

/// Like [`map_slice`] but stays sequential when `work` is small.
pub(crate) fn map_slice_sized<I, T, F>(items: &[I], work: usize, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    if work < MIN_PARALLEL_WORK {
        items.iter().map(f).collect()
    } else {
        map_slice(items, f)
    }
}

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
