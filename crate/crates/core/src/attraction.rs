//! Attraction functions: map a vertex's out-degree to its attachment weight
//! (discrete time) or birth rate (continuous time).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default length of the degree prefix scanned by [`AttractionSpec::validate`].
pub const DEFAULT_K_CHECK: usize = 10_000;

/// How a [`AttractionSpec::Table`] is extended past its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// Repeat the last value forever.
    ConstantLast,
    /// Degrees past the table are an error.
    #[default]
    Reject,
}

/// An attraction function `f: N -> [1, inf)`.
///
/// Serialized as an internally tagged object, e.g.
/// `{"kind":"alpha_sublinear","alpha":0.5}` or
/// `{"kind":"table","values":[1,1.2,1.5],"tail":"constant_last","alpha":0.9}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum AttractionSpec {
    /// `f = 1`: uniform attachment.
    Uniform,
    /// `f(k) = k + 1`: linear preferential attachment.
    Linear,
    /// `f(k) = (k + 1)^alpha` with `0 < alpha < 1`.
    AlphaSublinear { alpha: f64 },
    /// Explicit values `f(0), f(1), ...`; `alpha` optionally declares the
    /// exponent of the sublinear envelope `f(k) <= (k + 1)^alpha`.
    Table { values: Vec<f64>, tail: TailRule, alpha: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Uniform,
    Linear,
    AlphaSublinear,
    Table,
}

/// Flat wire form; keeps unknown or misplaced keys an error for every kind.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailRule>,
}

impl TryFrom<RawSpec> for AttractionSpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> Result<Self, String> {
        let extra = |what: &str| Err(format!("key '{what}' is not allowed for kind {:?}", raw.kind));
        match raw.kind {
            Kind::Uniform | Kind::Linear => {
                if raw.alpha.is_some() {
                    return extra("alpha");
                }
                if raw.values.is_some() {
                    return extra("values");
                }
                if raw.tail.is_some() {
                    return extra("tail");
                }
                Ok(if raw.kind == Kind::Uniform { AttractionSpec::Uniform } else { AttractionSpec::Linear })
            }
            Kind::AlphaSublinear => {
                if raw.values.is_some() {
                    return extra("values");
                }
                if raw.tail.is_some() {
                    return extra("tail");
                }
                let alpha = raw.alpha.ok_or("missing field 'alpha'")?;
                AttractionSpec::alpha_sublinear(alpha).map_err(|e| e.to_string())
            }
            Kind::Table => Ok(AttractionSpec::Table {
                values: raw.values.ok_or("missing field 'values'")?,
                tail: raw.tail.unwrap_or_default(),
                alpha: raw.alpha,
            }),
        }
    }
}

impl From<AttractionSpec> for RawSpec {
    fn from(spec: AttractionSpec) -> Self {
        let bare = |kind| RawSpec { kind, alpha: None, values: None, tail: None };
        match spec {
            AttractionSpec::Uniform => bare(Kind::Uniform),
            AttractionSpec::Linear => bare(Kind::Linear),
            AttractionSpec::AlphaSublinear { alpha } => RawSpec { alpha: Some(alpha), ..bare(Kind::AlphaSublinear) },
            AttractionSpec::Table { values, tail, alpha } => {
                RawSpec { kind: Kind::Table, alpha, values: Some(values), tail: Some(tail) }
            }
        }
    }
}

/// One of the conditions checked by [`AttractionSpec::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Parameters are finite and in range (alpha in (0, 1), nonempty table).
    WellFormed,
    /// `f` is nondecreasing.
    Nondecreasing,
    /// `f(k) >= 1` for all `k`.
    AtLeastOne,
    /// `f` is not identically equal to 1.
    NotIdenticallyOne,
    /// There is `0 < alpha < 1` with `f(k) <= (k + 1)^alpha` for all `k`.
    SublinearBound,
}

impl Condition {
    /// Whether a violation of this condition makes `f` unusable as an
    /// attraction function at all (rather than merely not sublinear).
    pub fn is_basic(self) -> bool {
        matches!(self, Condition::WellFormed | Condition::Nondecreasing | Condition::AtLeastOne)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::WellFormed => "parameters are well formed",
            Condition::Nondecreasing => "f is a nondecreasing function",
            Condition::AtLeastOne => "f(i) >= 1 for all i >= 0",
            Condition::NotIdenticallyOne => "f is not identically equal to 1",
            Condition::SublinearBound => "f(i) <= (i+1)^alpha for some 0 < alpha < 1",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

/// Outcome of checking a spec against the sublinear class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// True iff no condition is violated, i.e. `f` is sublinear.
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self { valid: violations.is_empty(), violations }
    }

    /// `f` can drive a growth process (well formed, `>= 1`, nondecreasing),
    /// whether or not it is sublinear.
    pub fn is_admissible(&self) -> bool {
        self.violations.iter().all(|v| !v.condition.is_basic())
    }

    pub fn violates(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl AttractionSpec {
    pub fn alpha_sublinear(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(AttractionSpec::AlphaSublinear { alpha })
        } else {
            Err(Error::InvalidSpec(format!("alpha must lie in (0, 1), got {alpha}")))
        }
    }

    /// `f(k)`.
    #[inline]
    pub fn evaluate(&self, k: usize) -> Result<f64> {
        match self {
            AttractionSpec::Uniform => Ok(1.0),
            AttractionSpec::Linear => Ok(k as f64 + 1.0),
            AttractionSpec::AlphaSublinear { alpha } => Ok((k as f64 + 1.0).powf(*alpha)),
            AttractionSpec::Table { values, tail, .. } => match values.get(k) {
                Some(&v) => Ok(v),
                None => match (tail, values.last()) {
                    (TailRule::ConstantLast, Some(&v)) => Ok(v),
                    _ => Err(Error::UndefinedDegree(k)),
                },
            },
        }
    }

    /// The declared or implied sublinear exponent, if any.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            AttractionSpec::AlphaSublinear { alpha } => Some(*alpha),
            AttractionSpec::Table { alpha, .. } => *alpha,
            _ => None,
        }
    }

    /// `sup_k f(k)` when finite.
    pub(crate) fn supremum(&self) -> Option<f64> {
        match self {
            AttractionSpec::Uniform => Some(1.0),
            AttractionSpec::Linear | AttractionSpec::AlphaSublinear { .. } => None,
            AttractionSpec::Table { values, tail: TailRule::ConstantLast, .. } => {
                values.iter().copied().reduce(f64::max)
            }
            // Nothing is known past a rejecting table.
            AttractionSpec::Table { tail: TailRule::Reject, .. } => None,
        }
    }

    /// Smallest known `beta` with `f(k) <= (k + 1)^beta` for every `k`.
    pub(crate) fn power_envelope(&self) -> Option<f64> {
        match self {
            AttractionSpec::Uniform => Some(0.0),
            AttractionSpec::Linear => Some(1.0),
            AttractionSpec::AlphaSublinear { alpha } => Some(*alpha),
            AttractionSpec::Table { alpha, .. } => *alpha,
        }
    }

    /// Checks the sublinear-class conditions on the prefix `[0, DEFAULT_K_CHECK]`.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with(DEFAULT_K_CHECK)
    }

    /// Checks the sublinear-class conditions, scanning degrees `0..=k_check`
    /// where no analytic argument is available. Every violated condition is
    /// reported once.
    pub fn validate_with(&self, k_check: usize) -> ValidationReport {
        let mut out = Vec::new();
        let mut push = |condition, detail: String| out.push(Violation { condition, detail });
        match self {
            AttractionSpec::Uniform => push(
                Condition::NotIdenticallyOne,
                "uniform attachment has f = 1 everywhere".into(),
            ),
            AttractionSpec::Linear => push(
                Condition::SublinearBound,
                "f(1) = 2 exceeds 2^alpha for every alpha < 1".into(),
            ),
            AttractionSpec::AlphaSublinear { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0 && *alpha < 1.0) {
                    push(Condition::WellFormed, format!("alpha = {alpha} is outside (0, 1)"));
                }
            }
            AttractionSpec::Table { values, tail, alpha } => {
                return ValidationReport::from_violations(validate_table(
                    values, *tail, *alpha, k_check,
                ));
            }
        }
        ValidationReport::from_violations(out)
    }
}

fn validate_table(
    values: &[f64],
    tail: TailRule,
    alpha: Option<f64>,
    k_check: usize,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if values.is_empty() {
        out.push(Violation {
            condition: Condition::WellFormed,
            detail: "table has no values".into(),
        });
        return out;
    }
    if let Some(a) = alpha {
        if !(a.is_finite() && a > 0.0 && a < 1.0) {
            out.push(Violation {
                condition: Condition::WellFormed,
                detail: format!("declared alpha = {a} is outside (0, 1)"),
            });
        }
    }
    if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        out.push(Violation {
            condition: Condition::WellFormed,
            detail: format!("f({k}) = {v} is not finite"),
        });
        return out;
    }

    // A constant tail adds nothing new to check beyond the last entry.
    let upto = values.len().min(k_check + 1);
    let prefix = &values[..upto];

    if let Some((k, v)) = prefix.iter().enumerate().find(|(_, &v)| v < 1.0) {
        out.push(Violation {
            condition: Condition::AtLeastOne,
            detail: format!("f({k}) = {v} < 1"),
        });
    }
    if let Some(k) = prefix.windows(2).position(|w| w[1] < w[0]) {
        out.push(Violation {
            condition: Condition::Nondecreasing,
            detail: format!("f({}) = {} < f({k}) = {}", k + 1, prefix[k + 1], prefix[k]),
        });
    }
    if prefix.iter().all(|&v| v == 1.0) && (upto == values.len() || tail == TailRule::ConstantLast) {
        out.push(Violation {
            condition: Condition::NotIdenticallyOne,
            detail: "every tabulated value equals 1".into(),
        });
    }

    match alpha.filter(|a| a.is_finite() && *a > 0.0 && *a < 1.0) {
        Some(a) => {
            if let Some((k, v)) = prefix
                .iter()
                .enumerate()
                .find(|(k, &v)| v > (*k as f64 + 1.0).powf(a) * (1.0 + 1e-12))
            {
                out.push(Violation {
                    condition: Condition::SublinearBound,
                    detail: format!("f({k}) = {v} exceeds ({k}+1)^{a}"),
                });
            }
        }
        None if alpha.is_none() => {
            // No declared exponent: the tightest one compatible with the prefix.
            if prefix[0] > 1.0 {
                out.push(Violation {
                    condition: Condition::SublinearBound,
                    detail: format!("f(0) = {} exceeds 1 = 1^alpha", prefix[0]),
                });
            } else {
                let needed = prefix
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &v)| v.max(1.0).ln() / (k as f64 + 1.0).ln())
                    .fold(0.0, f64::max);
                if needed >= 1.0 {
                    out.push(Violation {
                        condition: Condition::SublinearBound,
                        detail: format!("the table needs exponent {needed} >= 1"),
                    });
                }
            }
        }
        None => {}
    }
    out
}
