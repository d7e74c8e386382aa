//! Per-trial random streams.
//!
//! Trial `i` of an experiment with master seed `s` draws from ChaCha8 keyed by
//! `s` on stream `i`, so results do not depend on how trials are scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

/// Identifies the derivation scheme above; recorded next to every result.
pub const SEED_SCHEME: &str = "chacha8-seed_from_u64-stream/v1";

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(master_seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` independent trials in parallel; results come back in
/// trial order.
pub fn run_trials<T, F>(master_seed: u64, trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut TrialRng) -> Result<T> + Sync,
{
    run_trials_from(master_seed, 0, trials, f)
}

/// Like [`run_trials`], with trial `i` drawing from stream `first_stream + i`.
/// Experiments sweeping several configurations give each one its own block
/// of streams.
pub fn run_trials_from<T, F>(master_seed: u64, first_stream: u64, trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut TrialRng) -> Result<T> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(master_seed, first_stream + i as u64)))
        .collect()
}
