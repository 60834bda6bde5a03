//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature enabled the helpers dispatch to rayon; without
//! it they run on the calling thread. Results are always collected in index
//! order, so the output is identical either way as long as `f` derives any
//! randomness from the index it is given.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(i)` for `i in 0..n` and returns the results in index order.
///
/// `min_len` is the smallest batch handed to a worker; small, cheap jobs
/// should pass a large value so they effectively stay on one thread.
pub fn map_indexed<T, F>(n: usize, min_len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n >= 2 * min_len.max(1) {
            return (0..n)
                .into_par_iter()
                .with_min_len(min_len.max(1))
                .map(f)
                .collect();
        }
        (0..n).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = min_len;
        (0..n).map(f).collect()
    }
}

/// Runs `f` on a pool of `jobs` worker threads.
///
/// Without the `parallel` feature this just calls `f`.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        f()
    }
}
