//! Deterministic data-parallel execution.
//!
//! Repetitions of an experiment and trials of a verification suite are
//! independent, so they can run on a thread pool. Results are collected
//! into a vector indexed by task id and all downstream aggregation walks
//! that vector in index order, which makes the output of a parallel run
//! byte-identical to the sequential one.
//!
//! With the `parallel` feature disabled (or `threads = Some(1)`) everything
//! runs on the calling thread; the public behavior does not change.

/// Maps `f` over `0..n`, returning results in index order.
///
/// `threads` selects the execution mode: `Some(1)` forces the sequential
/// path, `Some(m)` uses a dedicated pool of `m` threads, and `None` uses
/// the default rayon pool. Without the `parallel` feature all modes are
/// sequential.
pub fn indexed_map<T, F>(n: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match threads {
            Some(1) => indexed_map_seq(n, f),
            Some(m) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(m)
                    .build()
                    .expect("failed to build thread pool");
                pool.install(|| (0..n).into_par_iter().map(f).collect())
            }
            None => (0..n).into_par_iter().map(f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        indexed_map_seq(n, f)
    }
}

/// Sequential reference path for [`indexed_map`]; also the baseline the
/// benchmark suite compares against.
pub fn indexed_map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
