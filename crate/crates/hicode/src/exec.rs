//! Execution strategy for the data-parallel inner loops.
//!
//! With the `parallel` feature (default) these helpers fan out over rayon;
//! without it they fall back to plain sequential iterators. Both paths
//! produce results in input order, so callers are deterministic either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum items per rayon task; below this, splitting costs more than it
/// saves.
#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 8;

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().with_min_len(MIN_CHUNK).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map `f` over a slice, collecting results in input order.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items
            .par_iter()
            .with_min_len(MIN_CHUNK * 64)
            .map(f)
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// True when this build fans work out over rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
