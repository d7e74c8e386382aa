use serde::Serialize;

use super::stats::proportion_se;
use super::table::{opt, CsvTable};
use crate::attraction::AttractionSpec;
use crate::error::{invalid, Result};
use crate::growth::grow_discrete;
use crate::seeds::run_trials;
use crate::tree::GrowingTree;

/// The `k` vertices of smallest `psi`, ties broken toward older vertices,
/// sorted by `(psi, index)`.
pub fn h_k_psi(tree: &GrowingTree, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > tree.len() {
        return invalid(format!("K = {k} must lie in [1, {}]", tree.len()));
    }
    let psi = tree.psi_all();
    let mut order: Vec<usize> = (0..tree.len()).collect();
    order.sort_by_key(|&v| (psi[v], v));
    order.truncate(k);
    Ok(order)
}

/// Number of vertices ranked ahead of the root in `(psi, index)` order; the
/// root belongs to the `K`-vertex confidence set iff `K > root_rank`.
pub fn root_rank(psi: &[usize]) -> usize {
    psi.iter().filter(|&&p| p < psi[0]).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub alpha: Option<f64>,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub successes: usize,
    pub coverage: f64,
    pub std_error: f64,
}

/// Empirical `P(v_1 in H^K_psi(T_n))` per `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageTable {
    pub rows: Vec<CoverageRow>,
}

impl CoverageTable {
    /// Smallest tabulated `K` whose coverage reaches `target`.
    pub fn smallest_k(&self, target: f64) -> Option<usize> {
        self.rows.iter().filter(|r| r.coverage >= target).map(|r| r.k).min()
    }
}

impl CsvTable for CoverageTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["alpha", "n", "k", "trials", "successes", "coverage", "std_error"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    opt(r.alpha),
                    r.n.to_string(),
                    r.k.to_string(),
                    r.trials.to_string(),
                    r.successes.to_string(),
                    r.coverage.to_string(),
                    r.std_error.to_string(),
                ]
            })
            .collect()
    }
}

/// Grows `trials` independent `n`-vertex trees and records, for each `K` in
/// `k_list`, how often the root lies in the `K` most balanced vertices.
///
/// Only `alpha`-sublinear specs are accepted unless `allow_other_specs` is
/// set. Every `K` is scored on the same trees, so coverage is exactly
/// nondecreasing in `K`.
pub fn root_coverage(
    spec: &AttractionSpec,
    n: usize,
    k_list: &[usize],
    trials: usize,
    master_seed: u64,
    allow_other_specs: bool,
) -> Result<CoverageTable> {
    if !allow_other_specs && !matches!(spec, AttractionSpec::AlphaSublinear { .. }) {
        return invalid("root coverage is defined for alpha-sublinear specs; set the override to use others");
    }
    if n == 0 || trials == 0 {
        return invalid("n and trials must be positive");
    }
    if let Some(&k) = k_list.iter().find(|&&k| k == 0 || k > n) {
        return invalid(format!("K = {k} must lie in [1, {n}]"));
    }
    let ranks = run_trials(master_seed, trials, |_, rng| {
        let tree = grow_discrete(spec, n, rng)?;
        Ok(root_rank(&tree.psi_all()))
    })?;
    let rows = k_list
        .iter()
        .map(|&k| {
            let successes = ranks.iter().filter(|&&r| r < k).count();
            let coverage = successes as f64 / trials as f64;
            CoverageRow {
                alpha: spec.alpha(),
                n,
                k,
                trials,
                successes,
                coverage,
                std_error: proportion_se(coverage, trials),
            }
        })
        .collect();
    Ok(CoverageTable { rows })
}
