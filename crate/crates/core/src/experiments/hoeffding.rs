use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use super::stats::proportion_se;
use super::table::CsvTable;
use crate::error::{invalid, Result};
use crate::seeds::run_trials_from;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoeffdingRow {
    pub n: usize,
    pub trials: usize,
    /// Empirical `P(X_1 + ... + X_n <= Y)`.
    pub empirical: f64,
    pub std_error: f64,
    /// `E[exp(-(X_1 + ... + X_n))] = 2^{-n}`.
    pub analytic: f64,
    /// `1 / n^2`.
    pub bound: f64,
}

impl CsvTable for Vec<HoeffdingRow> {
    fn header(&self) -> Vec<&'static str> {
        vec!["n", "trials", "empirical", "std_error", "analytic", "bound"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.trials.to_string(),
                    r.empirical.to_string(),
                    r.std_error.to_string(),
                    r.analytic.to_string(),
                    r.bound.to_string(),
                ]
            })
            .collect()
    }
}

/// Estimates `P(sum_{i<=n} X_i <= Y)` for independent unit exponentials and
/// compares it with the exact `2^{-n}` and the `1/n^2` envelope.
pub fn hoeffding_probe(n_list: &[usize], trials: usize, master_seed: u64) -> Result<Vec<HoeffdingRow>> {
    if trials == 0 || n_list.contains(&0) {
        return invalid("trials and every n must be positive");
    }
    n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let hits = run_trials_from(master_seed, (i * trials) as u64, trials, |_, rng| {
                let sum: f64 = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).sum();
                let y: f64 = rng.sample(Exp1);
                Ok(sum <= y)
            })?;
            let p = hits.iter().filter(|&&h| h).count() as f64 / trials as f64;
            Ok(HoeffdingRow {
                n,
                trials,
                empirical: p,
                std_error: proportion_se(p, trials),
                analytic: 0.5f64.powi(n as i32),
                bound: 1.0 / (n * n) as f64,
            })
        })
        .collect()
}
