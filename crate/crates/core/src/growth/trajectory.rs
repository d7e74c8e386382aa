use rand::Rng;

use super::cmj::{CmjProcess, DEFAULT_POPULATION_CAP};
use crate::attraction::AttractionSpec;
use crate::error::{invalid, Result};

/// Population `Z_t` of a CMJ process sampled on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CmjTrajectory {
    pub times: Vec<f64>,
    pub populations: Vec<usize>,
    /// Malthusian parameter used for `normalized`, when supplied.
    pub theta: Option<f64>,
    /// `e^{-theta t} Z_t`, present iff `theta` is.
    pub normalized: Option<Vec<f64>>,
}

impl CmjTrajectory {
    fn new(theta: Option<f64>) -> Self {
        Self { times: Vec::new(), populations: Vec::new(), theta, normalized: theta.map(|_| Vec::new()) }
    }

    fn record(&mut self, t: f64, z: usize) {
        self.times.push(t);
        self.populations.push(z);
        if let (Some(theta), Some(norm)) = (self.theta, self.normalized.as_mut()) {
            norm.push((-theta * t).exp() * z as f64);
        }
    }

    pub fn final_population(&self) -> usize {
        *self.populations.last().unwrap_or(&1)
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Least-squares slope of `ln Z_t` against `t` over grid points in
    /// `[from, to]`; `None` with fewer than two points.
    pub fn log_slope(&self, from: f64, to: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.populations)
            .filter(|(&t, _)| t >= from && t <= to)
            .map(|(&t, &z)| (t, (z as f64).ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mz = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mz)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}

fn check_grid(sample_dt: f64, theta: Option<f64>) -> Result<()> {
    if !(sample_dt.is_finite() && sample_dt > 0.0) {
        return invalid(format!("sample_dt = {sample_dt} must be positive"));
    }
    if let Some(th) = theta {
        if !(th.is_finite() && th > 0.0) {
            return invalid(format!("theta = {th} must be positive"));
        }
    }
    Ok(())
}

/// Records `Z_t` on `{0, dt, 2dt, ...}` up to `t_end`, starting from one
/// individual.
pub fn population_trajectory<R: Rng + ?Sized>(
    spec: &AttractionSpec,
    t_end: f64,
    sample_dt: f64,
    theta: Option<f64>,
    rng: &mut R,
) -> Result<CmjTrajectory> {
    population_trajectory_capped(spec, t_end, sample_dt, theta, DEFAULT_POPULATION_CAP, rng)
}

/// [`population_trajectory`] with an explicit population cap.
pub fn population_trajectory_capped<R: Rng + ?Sized>(
    spec: &AttractionSpec,
    t_end: f64,
    sample_dt: f64,
    theta: Option<f64>,
    cap: usize,
    rng: &mut R,
) -> Result<CmjTrajectory> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return invalid(format!("t_end = {t_end} must be positive"));
    }
    check_grid(sample_dt, theta)?;
    let mut p = CmjProcess::new(spec, rng)?.with_cap(cap);
    let mut out = CmjTrajectory::new(theta);
    // Grid index rather than accumulated sums keeps the points exact multiples.
    let steps = (t_end / sample_dt + 1e-9).floor() as usize;
    for i in 0..=steps {
        let t = i as f64 * sample_dt;
        p.advance_to(t, rng)?;
        out.record(t, p.population());
    }
    Ok(out)
}

/// Records `Z_t` on `{0, dt, 2dt, ...}` until the first grid point at which
/// the population has reached `target`.
pub fn population_trajectory_until<R: Rng + ?Sized>(
    spec: &AttractionSpec,
    target: usize,
    sample_dt: f64,
    theta: Option<f64>,
    rng: &mut R,
) -> Result<CmjTrajectory> {
    check_grid(sample_dt, theta)?;
    if target == 0 {
        return invalid("target population must be at least 1");
    }
    let mut p = CmjProcess::new(spec, rng)?;
    let mut out = CmjTrajectory::new(theta);
    let mut i = 0usize;
    loop {
        let t = i as f64 * sample_dt;
        p.advance_to(t, rng)?;
        out.record(t, p.population());
        if p.population() >= target {
            return Ok(out);
        }
        i += 1;
    }
}
