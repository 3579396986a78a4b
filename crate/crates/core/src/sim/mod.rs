//! Seeded Monte Carlo experiments and their on-disk artifacts.

pub mod comparison;
pub mod persist;
pub mod sampler;
pub mod theorem5;

pub use comparison::{run_comparison, ComparisonRun, ExperimentConfig, Summary, TrialOutcome, TrialRecord};
pub use persist::{persist_run, rerun_from_manifest, Manifest};
pub use sampler::{sample, trial_seed};
pub use theorem5::{adversarial_theorem5, run_theorem5_experiment, Candidates, Theorem5Report};

use crate::error::{Error, Result};

/// Runs `f` on a pool of `threads` workers, or on the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::param("thread count must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::param(format!("cannot start {n} worker threads: {e}"))),
    }
}
