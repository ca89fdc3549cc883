//! Trial execution. Trials derive independent seeds from (seed, index), so
//! results are identical whether they run on the rayon pool (`parallel`
//! feature, default) or in a plain sequential loop.

#[cfg(feature = "parallel")]
pub fn map_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    map_trials_seq(trials, f)
}

/// Sequential reference path, always available; the benches compare it
/// against the parallel one.
pub fn map_trials_seq<T, F>(trials: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..trials).map(f).collect()
}
