use serde::Serialize;

use super::stats::{ecdf_sorted, mean, quantile_sorted, std_error};
use super::table::CsvTable;
use crate::attraction::AttractionSpec;
use crate::error::{invalid, Result};
use crate::growth::{CmjProcess, Stop};
use crate::seeds::run_trials;

pub const DECILES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Population at `t_end` of a shifted-root process `H` against the sum of
/// `d + 1` independent single-vertex processes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub d: usize,
    pub alpha: f64,
    pub t_end: f64,
    pub trials: usize,
    pub mean_shifted: f64,
    pub se_shifted: f64,
    pub mean_sum: f64,
    pub se_sum: f64,
    /// [`DECILES`] of each sample.
    pub quantiles_shifted: Vec<f64>,
    pub quantiles_sum: Vec<f64>,
    /// Both ECDFs evaluated at the deciles of the pooled sample.
    pub ecdf_points: Vec<f64>,
    pub ecdf_shifted: Vec<f64>,
    pub ecdf_sum: Vec<f64>,
}

impl DominanceReport {
    /// `(mean_sum - mean_shifted)` in units of its standard error.
    pub fn mean_gap_z(&self) -> f64 {
        let se = self.se_shifted.hypot(self.se_sum);
        if se == 0.0 {
            return 0.0;
        }
        (self.mean_sum - self.mean_shifted) / se
    }

    /// Number of ECDF points where the sum's ECDF exceeds that of `H` by more
    /// than `z` standard errors of the difference.
    pub fn ecdf_violations(&self, z: f64) -> usize {
        let n = self.trials as f64;
        self.ecdf_sum
            .iter()
            .zip(&self.ecdf_shifted)
            .filter(|(&s, &h)| {
                let se = ((s * (1.0 - s) + h * (1.0 - h)) / n).sqrt();
                s - h > z * se
            })
            .count()
    }
}

impl CsvTable for DominanceReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["d", "alpha", "t_end", "trials", "statistic", "level", "shifted_root", "independent_sum"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let row = |stat: &str, level: String, h: f64, s: f64| {
            vec![
                self.d.to_string(),
                self.alpha.to_string(),
                self.t_end.to_string(),
                self.trials.to_string(),
                stat.to_string(),
                level,
                h.to_string(),
                s.to_string(),
            ]
        };
        let mut rows = vec![
            row("mean", String::new(), self.mean_shifted, self.mean_sum),
            row("std_error", String::new(), self.se_shifted, self.se_sum),
        ];
        for (i, q) in DECILES.iter().enumerate() {
            rows.push(row("quantile", q.to_string(), self.quantiles_shifted[i], self.quantiles_sum[i]));
        }
        for (i, x) in self.ecdf_points.iter().enumerate() {
            rows.push(row("ecdf", x.to_string(), self.ecdf_shifted[i], self.ecdf_sum[i]));
        }
        rows
    }
}

/// Compares `H(t_end)`, whose root gives birth at rate `f(i + d)` after `i`
/// births, with the total population of `d + 1` independent processes
/// started from single vertices, all driven by `f(i) = (i + 1)^alpha`.
pub fn dominance_check(d: usize, alpha: f64, t_end: f64, trials: usize, master_seed: u64) -> Result<DominanceReport> {
    let spec = AttractionSpec::alpha_sublinear(alpha)?;
    if trials == 0 {
        return invalid("trials must be positive");
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return invalid(format!("t_end = {t_end} must be finite and >= 0"));
    }
    let pairs = run_trials(master_seed, trials, |_, rng| {
        let mut h = CmjProcess::with_root_shift(&spec, d, rng)?;
        h.run(Stop::Time(t_end), rng)?;
        let mut sum = 0;
        for _ in 0..=d {
            let mut p = CmjProcess::new(&spec, rng)?;
            p.run(Stop::Time(t_end), rng)?;
            sum += p.population();
        }
        Ok((h.population() as f64, sum as f64))
    })?;
    let mut shifted: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut summed: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mean_shifted, se_shifted) = (mean(&shifted), std_error(&shifted));
    let (mean_sum, se_sum) = (mean(&summed), std_error(&summed));
    shifted.sort_by(f64::total_cmp);
    summed.sort_by(f64::total_cmp);
    let mut pooled = [shifted.as_slice(), summed.as_slice()].concat();
    pooled.sort_by(f64::total_cmp);
    let ecdf_points: Vec<f64> = DECILES.iter().map(|&q| quantile_sorted(&pooled, q)).collect();
    Ok(DominanceReport {
        d,
        alpha,
        t_end,
        trials,
        mean_shifted,
        se_shifted,
        mean_sum,
        se_sum,
        quantiles_shifted: DECILES.iter().map(|&q| quantile_sorted(&shifted, q)).collect(),
        quantiles_sum: DECILES.iter().map(|&q| quantile_sorted(&summed, q)).collect(),
        ecdf_shifted: ecdf_points.iter().map(|&x| ecdf_sorted(&shifted, x)).collect(),
        ecdf_sum: ecdf_points.iter().map(|&x| ecdf_sorted(&summed, x)).collect(),
        ecdf_points,
    })
}
