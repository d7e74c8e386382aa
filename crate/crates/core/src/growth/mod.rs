//! Tree growth in discrete time and through the continuous-time
//! Crump-Mode-Jagers embedding.

mod cmj;
mod discrete;
mod trajectory;
mod weighted_index;

pub use cmj::{grow_cmj, grow_from_seed_tree, CmjProcess, Stop, DEFAULT_POPULATION_CAP};
pub use discrete::{grow_discrete, DiscreteGrowth};
pub use trajectory::{population_trajectory, population_trajectory_capped, population_trajectory_until, CmjTrajectory};
pub use weighted_index::WeightedIndex;

use crate::attraction::AttractionSpec;
use crate::error::{Error, Result};

/// Memoised `f(k)` values; avoids recomputing powers in the inner loops.
#[derive(Debug, Clone)]
pub(crate) struct RateCache {
    spec: AttractionSpec,
    values: Vec<f64>,
}

impl RateCache {
    /// Fails unless `spec` is usable as an attraction function.
    pub(crate) fn new(spec: &AttractionSpec) -> Result<Self> {
        let report = spec.validate();
        if !report.is_admissible() {
            let why: Vec<String> = report
                .violations
                .iter()
                .filter(|v| v.condition.is_basic())
                .map(|v| v.detail.clone())
                .collect();
            return Err(Error::InvalidSpec(why.join("; ")));
        }
        Ok(Self { spec: spec.clone(), values: Vec::new() })
    }

    #[inline]
    pub(crate) fn rate(&mut self, k: usize) -> Result<f64> {
        if let Some(&v) = self.values.get(k) {
            return Ok(v);
        }
        while self.values.len() <= k {
            let v = self.spec.evaluate(self.values.len())?;
            self.values.push(v);
        }
        Ok(self.values[k])
    }
}
