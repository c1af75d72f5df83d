//! Data-parallel helpers with a sequential fallback.
//!
//! `jobs == 1` (or building without the `parallel` feature) runs everything on
//! the calling thread. Reductions must be associative and order independent;
//! callers break ties on explicit indices so results are identical either way.

/// Reads `CCL_JOBS`; `0` or missing means "let the runtime decide".
pub fn jobs_from_env() -> usize {
    std::env::var("CCL_JOBS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Maps `f` over `0..n` and folds the results with `reduce`.
pub fn map_reduce<A, F, R>(n: usize, jobs: usize, identity: A, f: F, reduce: R) -> A
where
    A: Clone + Send + Sync,
    F: Fn(usize) -> A + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if jobs != 1 && n > 1 {
            return parallel::map_reduce(n, jobs, identity, f, reduce);
        }
    }
    let _ = jobs;
    (0..n).fold(identity, |acc, i| reduce(acc, f(i)))
}

/// Maps `f` over `0..n` keeping output order.
pub fn map_collect<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if jobs != 1 && n > 1 {
            return parallel::map_collect(n, jobs, f);
        }
    }
    let _ = jobs;
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
mod parallel {
    use rayon::prelude::*;

    fn with_pool<T: Send>(jobs: usize, op: impl FnOnce() -> T + Send) -> T {
        if jobs == 0 {
            return op();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }

    pub fn map_reduce<A, F, R>(n: usize, jobs: usize, identity: A, f: F, reduce: R) -> A
    where
        A: Clone + Send + Sync,
        F: Fn(usize) -> A + Sync + Send,
        R: Fn(A, A) -> A + Sync + Send,
    {
        with_pool(jobs, || {
            (0..n)
                .into_par_iter()
                .with_min_len(8)
                .fold(|| identity.clone(), |acc, i| reduce(acc, f(i)))
                .reduce(|| identity.clone(), &reduce)
        })
    }

    pub fn map_collect<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        with_pool(jobs, || (0..n).into_par_iter().map(f).collect())
    }
}
