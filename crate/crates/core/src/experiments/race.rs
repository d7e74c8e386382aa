use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::stats::std_error;
use super::table::CsvTable;
use crate::attraction::AttractionSpec;
use crate::error::{invalid, Error, Result};
use crate::growth::{grow_from_seed_tree, Stop};
use crate::malthus::solve_malthusian;
use crate::seeds::run_trials;
use crate::tree::GrowingTree;

/// Starting configuration of one side of a race.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialShape {
    Single,
    /// Path `v1 - v2 - ... - vr` rooted at `v1`.
    Line(usize),
    /// `v1` with `r - 1` children.
    Star(usize),
    Tree(GrowingTree),
}

impl InitialShape {
    /// The starting tree, untimed so that both sides start at time 0.
    pub fn tree(&self) -> Result<GrowingTree> {
        match self {
            InitialShape::Single => Ok(GrowingTree::new()),
            InitialShape::Line(r) => GrowingTree::line(*r),
            InitialShape::Star(r) => GrowingTree::star(*r),
            InitialShape::Tree(t) => GrowingTree::from_parents(t.parents()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            InitialShape::Single => 1,
            InitialShape::Line(r) | InitialShape::Star(r) => *r,
            InitialShape::Tree(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for InitialShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialShape::Single => write!(f, "single"),
            InitialShape::Line(r) => write!(f, "line:{r}"),
            InitialShape::Star(r) => write!(f, "star:{r}"),
            InitialShape::Tree(t) => write!(f, "tree:{}", t.len()),
        }
    }
}

/// Parses `single`, `line:R` and `star:R`. Serialized trees are loaded by
/// the caller and wrapped in [`InitialShape::Tree`].
impl FromStr for InitialShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "single" {
            return Ok(InitialShape::Single);
        }
        let size = |r: &str| -> Result<usize> {
            match r.trim().parse::<usize>() {
                Ok(r) if r >= 1 => Ok(r),
                _ => invalid(format!("shape size in {s:?} must be a positive integer")),
            }
        };
        match s.split_once(':') {
            Some(("line", r)) => Ok(InitialShape::Line(size(r)?)),
            Some(("star", r)) => Ok(InitialShape::Star(size(r)?)),
            _ => invalid(format!("unknown shape {s:?}; expected single, line:R, star:R or file:PATH")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaceResult {
    pub shape1: String,
    pub shape2: String,
    pub t_end: f64,
    pub trials: usize,
    pub wins: usize,
    pub ties: usize,
    /// Empirical `P(pop1 > pop2)` with ties scored one half.
    pub p_first: f64,
    pub std_error: f64,
    pub mean_pop1: f64,
    pub mean_pop2: f64,
}

impl CsvTable for RaceResult {
    fn header(&self) -> Vec<&'static str> {
        vec!["shape1", "shape2", "t_end", "trials", "wins", "ties", "p_first", "std_error", "mean_pop1", "mean_pop2"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.shape1.clone(),
            self.shape2.clone(),
            self.t_end.to_string(),
            self.trials.to_string(),
            self.wins.to_string(),
            self.ties.to_string(),
            self.p_first.to_string(),
            self.std_error.to_string(),
            self.mean_pop1.to_string(),
            self.mean_pop2.to_string(),
        ]]
    }
}

impl CsvTable for Vec<RaceResult> {
    fn header(&self) -> Vec<&'static str> {
        RaceResult::header(self.first().expect("nonempty"))
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter().flat_map(|r| r.rows()).collect()
    }
}

/// Horizon at which a population started from `min_size` individuals is
/// expected to pass `10^4`: `(ln(10^4 / min_size) + 1) / theta`.
pub fn default_race_horizon(spec: &AttractionSpec, min_size: usize) -> Result<f64> {
    let theta = solve_malthusian(spec, 1e-9)?.theta;
    let growth = (1e4 / min_size.max(1) as f64).ln().max(0.0);
    Ok((growth + 1.0) / theta)
}

/// Runs paired independent CMJ continuations from both shapes up to
/// `t_end` and scores which population is larger.
pub fn race(
    shape1: &InitialShape,
    shape2: &InitialShape,
    spec: &AttractionSpec,
    t_end: f64,
    trials: usize,
    master_seed: u64,
) -> Result<RaceResult> {
    if trials == 0 {
        return invalid("trials must be positive");
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return invalid(format!("t_end = {t_end} must be finite and >= 0"));
    }
    let (start1, start2) = (shape1.tree()?, shape2.tree()?);
    let pops = run_trials(master_seed, trials, |_, rng| {
        let (a, _) = grow_from_seed_tree(start1.clone(), spec, Stop::Time(t_end), rng)?;
        let (b, _) = grow_from_seed_tree(start2.clone(), spec, Stop::Time(t_end), rng)?;
        Ok((a.len(), b.len()))
    })?;
    let scores: Vec<f64> = pops
        .iter()
        .map(|&(a, b)| match a.cmp(&b) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Less => 0.0,
        })
        .collect();
    let mean_of = |side: fn(&(usize, usize)) -> usize| pops.iter().map(|p| side(p) as f64).sum::<f64>() / trials as f64;
    Ok(RaceResult {
        shape1: shape1.to_string(),
        shape2: shape2.to_string(),
        t_end,
        trials,
        wins: scores.iter().filter(|&&s| s == 1.0).count(),
        ties: scores.iter().filter(|&&s| s == 0.5).count(),
        p_first: scores.iter().sum::<f64>() / trials as f64,
        std_error: std_error(&scores),
        mean_pop1: mean_of(|p| p.0),
        mean_pop2: mean_of(|p| p.1),
    })
}
