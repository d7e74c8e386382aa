use rand::Rng;
use serde::Serialize;

use super::table::CsvTable;
use crate::attraction::AttractionSpec;
use crate::error::{invalid, Result};
use crate::growth::DiscreteGrowth;
use crate::seeds::{run_trials, trial_rng};
use crate::tree::{directed_subtree_size, psi_from_sizes, CentroidReport};

/// Sizes up to which the centroid is recomputed after every step.
pub const DEFAULT_FULL_RECOMPUTE_UPTO: usize = 10_000;

/// A change of the selected centroid `v*(n)` observed at tree size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CentroidEvent {
    pub n: usize,
    pub old: usize,
    pub new: usize,
}

/// The `k_top` most balanced vertices at tree size `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Checkpoint {
    pub n: usize,
    pub top: Vec<usize>,
    pub psi: Vec<usize>,
}

/// Finite-horizon record of how the selected centroid moved. It is a proxy
/// for terminal centrality, which only exists in the limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentroidChangeLog {
    pub events: Vec<CentroidEvent>,
    pub checkpoints: Vec<Checkpoint>,
    pub final_n: usize,
    pub final_selected: usize,
    /// Tree sizes at which the centroid was recomputed.
    pub steps_checked: usize,
    /// Steps where `psi(v*(n)) > n/2`; always 0 for a correct implementation.
    pub half_bound_violations: usize,
    /// Steps where `|(T_{n+1}, v_{n+1})_{v*(n)↓}| < n/2`; always 0.
    pub newcomer_bound_violations: usize,
    /// Number of steps at which the newcomer bound was checked.
    pub newcomer_checks: usize,
}

impl CentroidChangeLog {
    /// Change events with `lo < n <= hi`.
    pub fn changes_in(&self, lo: usize, hi: usize) -> usize {
        self.events.iter().filter(|e| e.n > lo && e.n <= hi).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackOptions {
    pub checkpoints: Vec<usize>,
    pub k_top: usize,
    /// Recompute every step up to this size, then every `ceil(n / this)` steps.
    pub full_recompute_upto: usize,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self { checkpoints: Vec::new(), k_top: 10, full_recompute_upto: DEFAULT_FULL_RECOMPUTE_UPTO }
    }
}

fn stride(n: usize, full_upto: usize) -> usize {
    if n <= full_upto {
        1
    } else {
        n.div_ceil(full_upto)
    }
}

/// Grows one tree to `n_max` vertices (trial stream 0 of `master_seed`) and
/// tracks the selected centroid.
pub fn track_centroid(
    spec: &AttractionSpec,
    n_max: usize,
    checkpoints: &[usize],
    k_top: usize,
    master_seed: u64,
) -> Result<CentroidChangeLog> {
    let opts = TrackOptions { checkpoints: checkpoints.to_vec(), k_top, ..TrackOptions::default() };
    track_centroid_with_rng(spec, n_max, &opts, &mut trial_rng(master_seed, 0))
}

/// Independent [`track_centroid`] runs on trial streams `0..trials`.
pub fn track_centroid_trials(
    spec: &AttractionSpec,
    n_max: usize,
    opts: &TrackOptions,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<CentroidChangeLog>> {
    run_trials(master_seed, trials, |_, rng| track_centroid_with_rng(spec, n_max, opts, rng))
}

pub fn track_centroid_with_rng<R: Rng + ?Sized>(
    spec: &AttractionSpec,
    n_max: usize,
    opts: &TrackOptions,
    rng: &mut R,
) -> Result<CentroidChangeLog> {
    if n_max < 2 {
        return invalid("n_max must be at least 2");
    }
    if opts.k_top == 0 || opts.full_recompute_upto == 0 {
        return invalid("k_top and the recompute threshold must be positive");
    }
    if let Some(&c) = opts.checkpoints.iter().find(|&&c| c == 0 || c > n_max) {
        return invalid(format!("checkpoint {c} must lie in [1, {n_max}]"));
    }
    let mut checkpoints = opts.checkpoints.clone();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let mut next_checkpoint = checkpoints.iter().copied().peekable();

    let mut growth = DiscreteGrowth::new(spec)?;
    let mut log = CentroidChangeLog {
        events: Vec::new(),
        checkpoints: Vec::new(),
        final_n: n_max,
        final_selected: 0,
        steps_checked: 0,
        half_bound_violations: 0,
        newcomer_bound_violations: 0,
        newcomer_checks: 0,
    };
    let mut selected = 0usize;
    let mut next_check = 1usize;

    loop {
        let tree = growth.tree();
        let n = tree.len();
        let at_checkpoint = next_checkpoint.peek() == Some(&n);
        if n == next_check || at_checkpoint || n == n_max {
            let sizes = tree.subtree_sizes();
            let psi = psi_from_sizes(tree, &sizes);
            let report = CentroidReport::from_psi(&psi);
            log.steps_checked += 1;
            if 2 * report.psi() > n {
                log.half_bound_violations += 1;
            }
            if report.selected != selected {
                log.events.push(CentroidEvent { n, old: selected, new: report.selected });
                selected = report.selected;
            }
            if at_checkpoint {
                next_checkpoint.next();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&v| (psi[v], v));
                order.truncate(opts.k_top.min(n));
                let top_psi = order.iter().map(|&v| psi[v]).collect();
                log.checkpoints.push(Checkpoint { n, top: order, psi: top_psi });
            }
            if n == n_max {
                break;
            }
            next_check = n + stride(n, opts.full_recompute_upto);

            // Add v_{n+1} and check |(T_{n+1}, v_{n+1})_{v*(n)↓}| >= n/2.
            let parent = growth.step(rng)?;
            let toward_centroid =
                if parent == selected { n } else { directed_subtree_size(growth.tree(), &sizes, parent, selected) };
            log.newcomer_checks += 1;
            if 2 * toward_centroid < n {
                log.newcomer_bound_violations += 1;
            }
        } else {
            growth.step(rng)?;
        }
    }
    log.final_selected = selected;
    Ok(log)
}

impl CsvTable for CentroidChangeLog {
    fn header(&self) -> Vec<&'static str> {
        vec!["record", "n", "old", "new", "rank", "vertex", "psi"]
    }

    /// One row per change event, then one row per checkpoint entry, then a
    /// final summary row. Vertices are written 1-based, like tree files.
    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .events
            .iter()
            .map(|e| {
                vec!["change".into(), e.n.to_string(), (e.old + 1).to_string(), (e.new + 1).to_string(), String::new(), String::new(), String::new()]
            })
            .collect();
        for c in &self.checkpoints {
            for (rank, (v, p)) in c.top.iter().zip(&c.psi).enumerate() {
                rows.push(vec![
                    "checkpoint".into(),
                    c.n.to_string(),
                    String::new(),
                    String::new(),
                    (rank + 1).to_string(),
                    (v + 1).to_string(),
                    p.to_string(),
                ]);
            }
        }
        rows.push(vec![
            "final".into(),
            self.final_n.to_string(),
            String::new(),
            (self.final_selected + 1).to_string(),
            String::new(),
            String::new(),
            String::new(),
        ]);
        rows
    }
}
