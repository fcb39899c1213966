//! Independent Monte Carlo trials, run in parallel when the `parallel`
//! feature is on. Results always come back ordered by trial id, so the output
//! does not depend on the thread count.

use crate::error::{Error, Result};
use crate::rng::trial_seed;

/// Outcome of a batch of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatch<T> {
    /// Successful trials as `(trial_id, value)`, in trial order.
    pub ok: Vec<(u64, T)>,
    /// Failed trials, in trial order; excluded from every statistic.
    pub failed: Vec<(u64, Error)>,
}

impl<T> TrialBatch<T> {
    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.ok.iter().map(|(_, v)| v)
    }

    pub fn completed(&self) -> usize {
        self.ok.len()
    }

    /// Fails if no trial succeeded.
    pub fn require_any(&self) -> Result<()> {
        if self.ok.is_empty() {
            return Err(match self.failed.first() {
                Some((_, e)) => e.clone(),
                None => Error::param("trials", "need at least one trial"),
            });
        }
        Ok(())
    }
}

/// Runs `f(trial_id, seed)` for `trial_id` in `0..trials`, where `seed` is
/// [`trial_seed`]`(master_seed, id_base + trial_id)`.
pub fn run_trials<T, F>(master_seed: u64, id_base: u64, trials: usize, f: F) -> TrialBatch<T>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync + Send,
{
    let one = |t: u64| (t, f(t, trial_seed(master_seed, id_base + t)));
    #[cfg(feature = "parallel")]
    let all: Vec<(u64, Result<T>)> = {
        use rayon::prelude::*;
        (0..trials as u64).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let all: Vec<(u64, Result<T>)> = (0..trials as u64).map(one).collect();

    let mut batch = TrialBatch {
        ok: Vec::with_capacity(all.len()),
        failed: Vec::new(),
    };
    for (t, r) in all {
        match r {
            Ok(v) => batch.ok.push((t, v)),
            Err(e) => batch.failed.push((t, e)),
        }
    }
    batch
}

/// Runs `f` with at most `threads` worker threads (0 means the default).
/// Without the `parallel` feature this just calls `f`.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::param("threads", e.to_string()))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(f())
    }
}
