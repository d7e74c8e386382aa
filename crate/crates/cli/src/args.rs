use std::path::PathBuf;

use clap::Parser;
use cmjtree::AttractionSpec;

use crate::config::{parse_spec, Command, ExperimentConfig, GrowthModel};
use crate::error::ConfigError;

/// Preferential-attachment trees and branching-process experiments.
///
/// Settings come from an optional JSON config file; flags override it.
/// Each run writes `<cmd>.csv` and a `<cmd>.json` sidecar to the output
/// directory.
#[derive(Debug, Parser)]
#[command(name = "cmjtree", version = crate::VERSION, allow_negative_numbers = true)]
pub struct Cli {
    /// Subcommand to run; defaults to the config file's `cmd`.
    #[arg(value_enum)]
    pub cmd: Option<Command>,
    /// JSON config file.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Attraction function: uniform, linear, alpha:A, or a JSON object.
    #[arg(long, value_parser = parse_spec_arg)]
    pub spec: Option<AttractionSpec>,
    /// Growth model for `grow`.
    #[arg(long, value_enum)]
    pub model: Option<GrowthModel>,
    /// Number of vertices.
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Final tree size for `track`.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Time horizon of the branching process.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Grid spacing for recorded trajectories.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Stop a trajectory once the population reaches this size.
    #[arg(long)]
    pub target: Option<usize>,
    /// Confidence-set sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k_list: Option<Vec<usize>>,
    /// Tree sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Race line:R against star:R for each R, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub r_list: Option<Vec<usize>>,
    /// Tree sizes at which the most central vertices are logged.
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<usize>>,
    /// Number of vertices logged at each checkpoint.
    #[arg(long)]
    pub k_top: Option<usize>,
    /// single, line:R, star:R or file:PATH.
    #[arg(long)]
    pub shape1: Option<String>,
    /// Second race shape, same forms as --shape1.
    #[arg(long)]
    pub shape2: Option<String>,
    /// Root offset: the root gives birth at rate f(i + d).
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Exponent of f(i) = (i + 1)^alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Independent Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed; trial i uses stream i.
    #[arg(long, visible_alias = "seed")]
    pub master_seed: Option<u64>,
    /// Output directory [default: $CMJTREE_OUT_DIR, else .].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Abort once the population exceeds this size.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Recompute all centroids from scratch up to this tree size.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Root-finding tolerance for the growth rate.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Tree file for `analyze`.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Allow coverage runs with specs other than alpha:A.
    #[arg(long)]
    pub allow_other_specs: bool,
    /// Worker threads for Monte Carlo trials.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn parse_spec_arg(s: &str) -> Result<AttractionSpec, String> {
    parse_spec(s).map_err(|e| e.to_string())
}

impl Cli {
    /// The file config (if any) with every given flag applied on top.
    pub fn into_config(self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
                ExperimentConfig::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = Some(v);
                }
            )*};
        }
        set!(
            cmd, spec, model, n, n_max, t_end, dt, target, k_list, n_list, r_list, checkpoints, k_top, shape1, shape2,
            d, alpha, trials, master_seed, out_dir, cap, stride, tol, tree, threads
        );
        if self.allow_other_specs {
            cfg.allow_other_specs = Some(true);
        }
        Ok(cfg)
    }
}
