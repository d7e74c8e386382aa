//! Random trees grown by preferential attachment under a general attraction
//! function, their continuous-time branching-process embedding, Malthusian
//! parameters, and centroid / root-inference statistics.
//!
//! Vertex indices are 0-based in birth order throughout: index 0 is the
//! root `v_1`.

pub mod attraction;
pub mod error;
pub mod experiments;
pub mod growth;
pub mod malthus;
pub mod seeds;
pub mod tree;

pub use attraction::{AttractionSpec, TailRule, ValidationReport};
pub use error::{Error, Result};
pub use growth::{grow_cmj, grow_discrete, grow_from_seed_tree, CmjTrajectory, Stop, WeightedIndex};
pub use malthus::{mean_offspring, offspring_tail, solve_malthusian, MalthusEstimate};
pub use tree::{Centrality, CentroidReport, GrowingTree};
