//! Thin execution layer: data-parallel inner loops run on rayon when the
//! `parallel` feature is enabled and fall back to plain iteration otherwise.
//! Results are collected in index order, so the outcome is identical in both
//! modes and independent of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..count`, preserving index order in the output.
pub fn indexed_map<U, F>(count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Sequential twin of [`indexed_map`], available in every build so the two
/// execution paths can be benchmarked against each other.
pub fn indexed_map_seq<U, F>(count: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..count).map(f).collect()
}

/// True when the crate was built with the rayon-backed execution path.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// Caps the rayon thread pool. A no-op in sequential builds, and silently
/// ignored if the global pool was already initialized.
pub fn configure_threads(threads: Option<usize>) {
    #[cfg(feature = "parallel")]
    {
        if let Some(t) = threads {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
    }
}
