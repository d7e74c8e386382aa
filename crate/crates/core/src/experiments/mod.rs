//! Monte Carlo experiments: centroid tracking, root-confidence coverage,
//! maximum-degree scaling, races between seed trees, shifted-root
//! dominance and the exponential Hoeffding probe.
//!
//! Every experiment takes a master seed; trial `i` draws from
//! [`crate::seeds::trial_rng`]`(master_seed, stream)`, so reruns reproduce
//! their output exactly regardless of thread count.

mod centroid;
mod confidence;
mod dominance;
mod hoeffding;
mod max_degree;
mod race;
pub mod stats;
mod table;

pub use centroid::{
    track_centroid, track_centroid_trials, track_centroid_with_rng, CentroidChangeLog, CentroidEvent, Checkpoint,
    TrackOptions,
};
pub use confidence::{h_k_psi, root_coverage, root_rank, CoverageRow, CoverageTable};
pub use dominance::{dominance_check, DominanceReport, DECILES};
pub use hoeffding::{hoeffding_probe, HoeffdingRow};
pub use max_degree::{max_degree_scan, MaxDegreeRow};
pub use race::{default_race_horizon, race, InitialShape, RaceResult};
pub use table::{write_csv, CsvTable};
