use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::ValueEnum;
use cmjtree::AttractionSpec;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Grow,
    Analyze,
    Malthus,
    Trajectory,
    Coverage,
    Track,
    Maxdeg,
    Race,
    Dominance,
    Hoeffding,
}

/// Keys every subcommand accepts.
const COMMON_KEYS: &[&str] = &["cmd", "master_seed", "out_dir", "threads"];

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Grow => "grow",
            Command::Analyze => "analyze",
            Command::Malthus => "malthus",
            Command::Trajectory => "trajectory",
            Command::Coverage => "coverage",
            Command::Track => "track",
            Command::Maxdeg => "maxdeg",
            Command::Race => "race",
            Command::Dominance => "dominance",
            Command::Hoeffding => "hoeffding",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Grow => &["spec", "model", "n", "t_end", "cap"],
            Command::Analyze => &["tree"],
            Command::Malthus => &["spec", "tol"],
            Command::Trajectory => &["spec", "t_end", "target", "dt", "trials", "cap"],
            Command::Coverage => &["spec", "n", "k_list", "trials", "allow_other_specs"],
            Command::Track => &["spec", "n_max", "checkpoints", "k_top", "stride", "trials"],
            Command::Maxdeg => &["alpha", "n_list", "trials"],
            Command::Race => &["spec", "shape1", "shape2", "r_list", "t_end", "trials"],
            Command::Dominance => &["alpha", "d", "t_end", "trials"],
            Command::Hoeffding => &["n_list", "trials"],
        }
    }
}

/// How `grow` builds its tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GrowthModel {
    /// Vertex-by-vertex attachment.
    #[default]
    Discrete,
    /// Continuous-time branching process, with birth times.
    Cmj,
}

/// One experiment run. Every field is optional in the file; [`resolve`]
/// fills per-subcommand defaults and rejects keys that do not apply.
///
/// [`resolve`]: ExperimentConfig::resolve
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cmd: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<AttractionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<GrowthModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Grid spacing of `trajectory`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Population at which `trajectory` stops, instead of `t_end`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// `race`: line(r) against star(r) for each r.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_top: Option<usize>,
    /// `single`, `line:R`, `star:R` or `file:PATH`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Population cap for continuous-time growth.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// `track`: sizes up to which the centroid is recomputed every step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Tree file read by `analyze`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_other_specs: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

fn config_error<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn positive(key: &str, v: Option<usize>) -> Result<(), ConfigError> {
    match v {
        Some(0) => config_error(format!("{key} must be positive")),
        _ => Ok(()),
    }
}

fn positive_list(key: &str, v: &Option<Vec<usize>>) -> Result<(), ConfigError> {
    match v {
        Some(list) if list.is_empty() => config_error(format!("{key} must not be empty")),
        Some(list) if list.contains(&0) => config_error(format!("{key} entries must be positive")),
        _ => Ok(()),
    }
}

/// Parses `uniform`, `linear`, `alpha:A`, or a JSON object.
pub fn parse_spec(s: &str) -> Result<AttractionSpec, ConfigError> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| ConfigError(format!("spec: {e}")));
    }
    match s.split_once(':') {
        None if s == "uniform" => Ok(AttractionSpec::Uniform),
        None if s == "linear" => Ok(AttractionSpec::Linear),
        Some(("alpha", a)) => {
            let a: f64 = a.trim().parse().map_err(|_| ConfigError(format!("spec: bad alpha {a:?}")))?;
            AttractionSpec::alpha_sublinear(a).map_err(|e| ConfigError(format!("spec: {e}")))
        }
        _ => config_error(format!("spec: expected uniform, linear, alpha:A or a JSON object, got {s:?}")),
    }
}

impl ExperimentConfig {
    pub fn new(cmd: Command) -> Self {
        Self { cmd: Some(cmd), ..Self::default() }
    }

    /// Parses a JSON document; errors name the offending key.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                ConfigError(e.inner().to_string())
            } else {
                ConfigError(format!("{path}: {}", e.inner()))
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Keys present in this config, as they appear in JSON.
    fn present_keys(&self) -> BTreeSet<String> {
        match serde_json::to_value(self).expect("config serializes") {
            serde_json::Value::Object(map) => map.keys().cloned().collect(),
            _ => BTreeSet::new(),
        }
    }

    fn check_values(&self) -> Result<(), ConfigError> {
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol > 0.0) {
                return config_error("tol must be positive");
            }
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return config_error("dt must be positive");
            }
        }
        if let Some(t) = self.t_end {
            if !(t.is_finite() && t >= 0.0) {
                return config_error("t_end must be finite and nonnegative");
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return config_error("alpha must lie in (0, 1)");
            }
        }
        positive("n", self.n)?;
        positive("n_max", self.n_max)?;
        positive("target", self.target)?;
        positive("k_top", self.k_top)?;
        positive("trials", self.trials)?;
        positive("cap", self.cap)?;
        positive("stride", self.stride)?;
        positive("threads", self.threads)?;
        positive_list("k_list", &self.k_list)?;
        positive_list("n_list", &self.n_list)?;
        positive_list("r_list", &self.r_list)?;
        if matches!(&self.checkpoints, Some(c) if c.contains(&0)) {
            return config_error("checkpoints entries must be positive");
        }
        Ok(())
    }

    /// Validates and fills defaults, giving the config echoed to the sidecar.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        self.check_values()?;
        let Some(cmd) = self.cmd else {
            return config_error("cmd is required");
        };
        let allowed: BTreeSet<&str> = COMMON_KEYS.iter().chain(cmd.keys()).copied().collect();
        if let Some(key) = self.present_keys().into_iter().find(|k| !allowed.contains(k.as_str())) {
            return config_error(format!("{key} does not apply to {}", cmd.name()));
        }
        self.master_seed.get_or_insert(0);
        let sublinear = || AttractionSpec::alpha_sublinear(0.5).expect("valid alpha");
        match cmd {
            Command::Grow => {
                if self.spec.is_none() {
                    return config_error("spec is required for grow");
                }
                let model = *self.model.get_or_insert(GrowthModel::Discrete);
                match (self.n, self.t_end) {
                    (Some(_), Some(_)) => return config_error("grow takes n or t_end, not both"),
                    (None, None) => return config_error("grow needs n or t_end"),
                    (None, Some(_)) if model == GrowthModel::Discrete => {
                        return config_error("t_end requires model = cmj")
                    }
                    _ => {}
                }
                if self.cap.is_some() && model == GrowthModel::Discrete {
                    return config_error("cap requires model = cmj");
                }
            }
            Command::Analyze => {
                if self.tree.is_none() {
                    return config_error("tree is required for analyze");
                }
            }
            Command::Malthus => {
                if self.spec.is_none() {
                    return config_error("spec is required for malthus");
                }
                self.tol.get_or_insert(1e-10);
            }
            Command::Trajectory => {
                if self.spec.is_none() {
                    return config_error("spec is required for trajectory");
                }
                match (self.t_end, self.target) {
                    (Some(_), Some(_)) => return config_error("trajectory takes t_end or target, not both"),
                    (None, None) => return config_error("trajectory needs t_end or target"),
                    (None, Some(_)) if self.cap.is_some() => return config_error("cap applies only with t_end"),
                    _ => {}
                }
                self.dt.get_or_insert(0.1);
                self.trials.get_or_insert(1);
            }
            Command::Coverage => {
                self.spec.get_or_insert_with(sublinear);
                let n = *self.n.get_or_insert(1000);
                let k_list = self.k_list.get_or_insert_with(|| {
                    let mut ks: Vec<usize> =
                        [1, 2, 5, 10, 20, 50, 100, 200, 500].into_iter().filter(|&k| k < n).collect();
                    ks.push(n);
                    ks
                });
                if let Some(k) = k_list.iter().find(|&&k| k > n) {
                    return config_error(format!("k_list entry {k} exceeds n = {n}"));
                }
                self.trials.get_or_insert(1000);
                self.allow_other_specs.get_or_insert(false);
            }
            Command::Track => {
                self.spec.get_or_insert_with(sublinear);
                let n_max = *self.n_max.get_or_insert(2000);
                if n_max < 2 {
                    return config_error("n_max must be at least 2");
                }
                let checkpoints = self.checkpoints.get_or_insert_with(Vec::new);
                if let Some(c) = checkpoints.iter().find(|&&c| c > n_max) {
                    return config_error(format!("checkpoint {c} exceeds n_max = {n_max}"));
                }
                self.k_top.get_or_insert(10);
                self.stride.get_or_insert(cmjtree::experiments::TrackOptions::default().full_recompute_upto);
                self.trials.get_or_insert(1);
            }
            Command::Maxdeg => {
                self.alpha.get_or_insert(0.5);
                self.n_list.get_or_insert_with(|| vec![1000, 10_000, 100_000]);
                self.trials.get_or_insert(100);
            }
            Command::Race => {
                self.spec.get_or_insert_with(sublinear);
                match (&self.shape1, &self.shape2, &self.r_list) {
                    (Some(_), Some(_), None) | (None, None, Some(_)) => {}
                    _ => return config_error("race needs shape1 and shape2, or r_list"),
                }
                self.trials.get_or_insert(1000);
            }
            Command::Dominance => {
                self.alpha.get_or_insert(0.5);
                self.d.get_or_insert(0);
                self.trials.get_or_insert(1000);
            }
            Command::Hoeffding => {
                self.n_list.get_or_insert_with(|| vec![1, 3, 5, 8]);
                self.trials.get_or_insert(100_000);
            }
        }
        Ok(self)
    }

    pub fn command(&self) -> Command {
        self.cmd.expect("resolved config has a command")
    }
}
