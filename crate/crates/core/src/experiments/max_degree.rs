use serde::Serialize;

use super::stats::{mean, median};
use super::table::CsvTable;
use crate::attraction::AttractionSpec;
use crate::error::{invalid, Result};
use crate::growth::grow_discrete;
use crate::seeds::run_trials_from;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxDegreeRow {
    pub n: usize,
    pub trials: usize,
    pub median_max_degree: f64,
    pub mean_max_degree: f64,
    /// `(ln n)^{1/(1-alpha)}`.
    pub scale: f64,
    /// `median_max_degree / scale`; undefined (NaN) for `n = 1`.
    pub ratio: f64,
}

impl CsvTable for Vec<MaxDegreeRow> {
    fn header(&self) -> Vec<&'static str> {
        vec!["n", "trials", "median_max_degree", "mean_max_degree", "scale", "ratio"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.trials.to_string(),
                    r.median_max_degree.to_string(),
                    r.mean_max_degree.to_string(),
                    r.scale.to_string(),
                    r.ratio.to_string(),
                ]
            })
            .collect()
    }
}

/// Median maximum total degree of `alpha`-sublinear trees against the
/// `(log n)^{1/(1-alpha)}` growth order. Size `n_list[i]` uses trial streams
/// `i * trials ..`.
pub fn max_degree_scan(alpha: f64, n_list: &[usize], trials: usize, master_seed: u64) -> Result<Vec<MaxDegreeRow>> {
    let spec = AttractionSpec::alpha_sublinear(alpha)?;
    if trials == 0 || n_list.contains(&0) {
        return invalid("trials and every n must be positive");
    }
    n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let degs = run_trials_from(master_seed, (i * trials) as u64, trials, |_, rng| {
                Ok(grow_discrete(&spec, n, rng)?.max_degree() as f64)
            })?;
            let med = median(&degs);
            let scale = (n as f64).ln().powf(1.0 / (1.0 - alpha));
            let ratio = if n > 1 { med / scale } else { f64::NAN };
            Ok(MaxDegreeRow { n, trials, median_max_degree: med, mean_max_degree: mean(&degs), scale, ratio })
        })
        .collect()
}
