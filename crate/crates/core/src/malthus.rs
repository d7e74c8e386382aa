//! Malthusian parameter of the pure-birth point process driven by `f`.
//!
//! With `X ~ Exp(theta)` independent of the point process `xi`, the `k`-th
//! birth happens at a sum of independent `Exp(f(i))` delays, `i < k`, so
//!
//! ```text
//! P(xi(0, X] >= k) = prod_{i<k} f(i) / (theta + f(i))
//! ```
//!
//! and the Laplace-type transform `theta * int e^{-theta t} mu(t) dt`
//! equals `E[xi(0, X]] = sum_{k>=1} P(xi(0, X] >= k)`. The Malthusian
//! parameter is the `theta` at which this mean is 1. The series is summed
//! directly; the neglected remainder is bracketed from both sides using only
//! monotonicity of `f` and its known envelopes, and the midpoint of that
//! bracket is added to the partial sum.

use serde::Serialize;

use crate::attraction::AttractionSpec;
use crate::error::{invalid, Error, Result};

/// Summation stops once the remainder is pinned down to this width.
pub const SERIES_TOLERANCE: f64 = 1e-16;
/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 1_000_000;
/// Half-width of the gap kept between the bisection bracket and `(1, 2)`
/// for sublinear specs.
pub const SUBLINEAR_BRACKET_MARGIN: f64 = 1e-6;
/// Widest bracket tried for specs outside the sublinear class.
pub const SEARCH_RANGE: (f64, f64) = (1e-3, 64.0);

const MAX_BISECTIONS: usize = 200;

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 {
        Ok(())
    } else {
        invalid(format!("theta must be positive and finite, got {theta}"))
    }
}

/// `P(xi(0, X_theta] >= k) = prod_{i<k} f(i) / (theta + f(i))`.
pub fn offspring_tail(spec: &AttractionSpec, theta: f64, k: usize) -> Result<f64> {
    check_theta(theta)?;
    (0..k).try_fold(1.0, |p, i| {
        let f = spec.evaluate(i)?;
        Ok(p * f / (theta + f))
    })
}

/// A truncated series with the remainder folded in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on `|value - exact sum|` from the remainder envelope.
    pub truncation_bound: f64,
    /// Number of terms summed explicitly.
    pub terms: usize,
}

/// Lower and upper bounds on `sum_{j>k} P_j` given `P_k` and `f(k)`.
fn remainder_bounds(spec: &AttractionSpec, theta: f64, k: usize, p_k: f64, f_k: f64) -> (f64, f64) {
    if p_k == 0.0 {
        return (0.0, 0.0);
    }
    // Every later ratio f(i)/(theta+f(i)) is at least f(k)/(theta+f(k)).
    let mut lower = p_k * f_k / theta;
    let mut upper = f64::INFINITY;

    if let Some(sup) = spec.supremum() {
        upper = upper.min(p_k * sup / theta);
    }
    if let Some(beta) = spec.power_envelope() {
        if beta <= 1.0 && theta > 1.0 {
            // Ratios are at most (i+1)/(theta+i+1); the resulting gamma-ratio
            // series telescopes to (k+1)/(theta-1).
            let linear = p_k * (k as f64 + 1.0) / (theta - 1.0);
            upper = upper.min(linear);
            if matches!(spec, AttractionSpec::Linear) {
                lower = linear;
            }
        }
        if beta < 1.0 {
            upper = upper.min(p_k * doubling_block_bound(beta, theta, k));
        }
    }
    (lower, upper.max(lower))
}

/// Bound on `sum_{j>k} prod_{i=k}^{j-1} r_i` when `f(i) <= (i+1)^beta`,
/// `beta < 1`: over blocks `(s, 2s+1]` every ratio is at most the envelope
/// ratio at the block's right end, giving a geometric bound per block.
fn doubling_block_bound(beta: f64, theta: f64, k: usize) -> f64 {
    let mut start = k as f64;
    let mut weight = 1.0; // bound on P_start / P_k
    let mut total = 0.0;
    for _ in 0..64 {
        let end = 2.0 * start + 1.0;
        let len = end - start;
        let g = end.powf(beta); // envelope at index end-1 is (end)^beta
        let q = g / (theta + g);
        let block = weight * q * (1.0 - q.powf(len)) / (1.0 - q);
        total += block;
        weight *= q.powf(len);
        if block <= total * 1e-18 || weight == 0.0 {
            return total;
        }
        start = end;
    }
    f64::INFINITY
}

/// Running state of the series: `partial + [lo, hi]` brackets the sum.
struct Bracketed {
    partial: f64,
    lo: f64,
    hi: f64,
    terms: usize,
}

impl Bracketed {
    fn value(&self) -> SeriesValue {
        SeriesValue { value: self.partial + 0.5 * (self.lo + self.hi), truncation_bound: 0.5 * (self.hi - self.lo), terms: self.terms }
    }
}

/// Sums until the remainder bracket is narrower than [`SERIES_TOLERANCE`]
/// or `done` accepts it; `Err(last)` if [`MAX_TERMS`] is reached first.
fn sum_series(
    spec: &AttractionSpec,
    theta: f64,
    done: impl Fn(&Bracketed) -> bool,
) -> Result<std::result::Result<Bracketed, Bracketed>> {
    check_theta(theta)?;
    if matches!(spec, AttractionSpec::Linear) && theta <= 1.0 {
        return Err(Error::SeriesDiverged { theta });
    }
    let mut state = Bracketed { partial: 0.0, lo: 0.0, hi: f64::INFINITY, terms: 0 };
    let mut p = 1.0;
    for k in 1..=MAX_TERMS {
        let f_prev = spec.evaluate(k - 1)?;
        p *= f_prev / (theta + f_prev);
        state.partial += p;
        if k < 256 || k % 64 == 0 {
            let f_k = spec.evaluate(k)?;
            (state.lo, state.hi) = remainder_bounds(spec, theta, k, p, f_k);
            state.terms = k;
            if state.hi - state.lo <= SERIES_TOLERANCE || done(&state) {
                return Ok(Ok(state));
            }
        }
    }
    Ok(Err(state))
}

/// `E[xi(0, X_theta]] = sum_{k>=1} P(xi(0, X_theta] >= k)`, monotonically
/// decreasing in `theta`.
pub fn mean_offspring(spec: &AttractionSpec, theta: f64) -> Result<SeriesValue> {
    match sum_series(spec, theta, |_| false)? {
        Ok(s) => Ok(s.value()),
        Err(s) => Err(Error::SeriesNotConverged { partial: s.partial, bound: s.hi - s.lo, terms: MAX_TERMS }),
    }
}

/// Like [`mean_offspring`], but returns the best estimate with its wider
/// truncation bound when the term cap is reached.
fn mean_offspring_best_effort(spec: &AttractionSpec, theta: f64) -> Result<SeriesValue> {
    Ok(match sum_series(spec, theta, |_| false)? {
        Ok(s) | Err(s) => s.value(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MalthusEstimate {
    pub theta: f64,
    /// `|mean_offspring(theta) - 1|`.
    pub residual: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Remainder bound of the series evaluated at `theta`.
    pub truncation_bound: f64,
}

/// A value of `mean_offspring - 1` with the correct sign, as far as the
/// series can resolve it; a divergent series counts as `+inf`. Summation stops as soon as the sign is settled, which
/// matters for heavy tails near `theta = 1`.
fn excess(spec: &AttractionSpec, theta: f64) -> Result<f64> {
    let settled = |s: &Bracketed| s.partial + s.lo > 1.0 || s.partial + s.hi < 1.0;
    match sum_series(spec, theta, settled) {
        Ok(Ok(s)) if s.partial + s.lo > 1.0 => Ok(s.partial + s.lo - 1.0),
        Ok(Ok(s)) if s.partial + s.hi < 1.0 => Ok(s.partial + s.hi - 1.0),
        Ok(Ok(s)) => Ok(s.value().value - 1.0),
        // Term cap hit with 1 inside the bracket: the root is within the
        // truncation band, which the estimate's `truncation_bound` reports.
        Ok(Err(s)) => Ok(s.value().value - 1.0),
        Err(Error::SeriesDiverged { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Solves `mean_offspring(theta) = 1` by bisection until the bracket is
/// narrower than `tol` and the residual is at most `tol`.
///
/// Sublinear specs start from `(1, 2)` shrunk by
/// [`SUBLINEAR_BRACKET_MARGIN`]; anything else starts from `(0.5, 4)` and
/// widens geometrically up to [`SEARCH_RANGE`].
///
/// For `alpha` close to 1 the tail near the root may not resolve below `tol`
/// within [`MAX_TERMS`]; the estimate then carries a larger
/// `truncation_bound` instead of failing.
pub fn solve_malthusian(spec: &AttractionSpec, tol: f64) -> Result<MalthusEstimate> {
    if !(tol.is_finite() && tol > 0.0) {
        return invalid(format!("tol must be positive, got {tol}"));
    }
    let report = spec.validate();
    let (mut lo, mut hi) = if report.valid {
        (1.0 + SUBLINEAR_BRACKET_MARGIN, 2.0 - SUBLINEAR_BRACKET_MARGIN)
    } else if report.is_admissible() {
        let (min, max) = SEARCH_RANGE;
        let (mut lo, mut hi) = (0.5, 4.0);
        while excess(spec, lo)? <= 0.0 && lo > min {
            lo = (lo / 2.0).max(min);
        }
        while excess(spec, hi)? >= 0.0 && hi < max {
            hi = (hi * 2.0).min(max);
        }
        (lo, hi)
    } else {
        return Err(Error::InvalidSpec(
            report.violations.iter().map(|v| v.detail.as_str()).collect::<Vec<_>>().join("; "),
        ));
    };
    if !(excess(spec, lo)? > 0.0 && excess(spec, hi)? < 0.0) {
        let (lo, hi) = if report.valid { (lo, hi) } else { SEARCH_RANGE };
        return Err(Error::NoMalthusianRoot { lo, hi });
    }

    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let g = excess(spec, mid)?;
        iterations += 1;
        if g > 0.0 {
            lo = mid;
        } else if g < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
        let theta = 0.5 * (lo + hi);
        let at = mean_offspring_best_effort(spec, theta)?;
        let residual = (at.value - 1.0).abs();
        let converged = hi - lo < tol && residual <= tol;
        let exhausted = iterations >= MAX_BISECTIONS || hi - lo <= 4.0 * f64::EPSILON * hi;
        if converged || exhausted {
            return Ok(MalthusEstimate {
                theta,
                residual,
                bracket: (lo, hi),
                iterations,
                truncation_bound: at.truncation_bound,
            });
        }
    }
}
