use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence `{lambda_n} ⊂ [1, inf)` tending to 1, indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticRate {
    /// `lambda_n = 1` for all `n`.
    ConstantOne,
    /// The listed values for `n = 1..=len`, then 1 forever.
    Explicit(Vec<f64>),
    /// `lambda_n = 1 + c * n^(-q)`.
    Power { c: f64, q: f64 },
    /// Pointwise maximum of the members.
    Max(Vec<AsymptoticRate>),
}

/// How fast `lambda_n - 1` vanishes, for symbolic series classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Identically zero.
    Zero,
    /// Zero beyond a finite index.
    EventuallyZero,
    /// Comparable to `n^(-q)`.
    Power(f64),
}

impl AsymptoticRate {
    pub fn validate(&self) -> Result<()> {
        match self {
            AsymptoticRate::ConstantOne => Ok(()),
            AsymptoticRate::Explicit(values) => {
                if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "rate value {v} is not a finite number >= 1"
                    )));
                }
                Ok(())
            }
            AsymptoticRate::Power { c, q } => {
                if !(*c >= 0.0 && c.is_finite()) {
                    return Err(Error::InvalidArgument(format!("rate coefficient c = {c} must be >= 0")));
                }
                if !(*q > 0.0 && q.is_finite()) {
                    return Err(Error::InvalidArgument(format!("rate exponent q = {q} must be > 0")));
                }
                Ok(())
            }
            AsymptoticRate::Max(members) => {
                if members.is_empty() {
                    return Err(Error::InvalidArgument("empty rate maximum".into()));
                }
                members.iter().try_for_each(AsymptoticRate::validate)
            }
        }
    }

    /// Value at index `n >= 1`.
    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match self {
            AsymptoticRate::ConstantOne => 1.0,
            AsymptoticRate::Explicit(values) => values.get(n - 1).copied().unwrap_or(1.0),
            AsymptoticRate::Power { c, q } => 1.0 + c * (n as f64).powf(-q),
            AsymptoticRate::Max(members) => members.iter().map(|m| m.value(n)).fold(1.0, f64::max),
        }
    }

    /// `sup_n lambda_n`, computed exactly from the form.
    pub fn sup(&self) -> f64 {
        match self {
            AsymptoticRate::ConstantOne => 1.0,
            AsymptoticRate::Explicit(values) => values.iter().copied().fold(1.0, f64::max),
            // decreasing in n, so the sup is attained at n = 1
            AsymptoticRate::Power { c, .. } => 1.0 + c,
            AsymptoticRate::Max(members) => members.iter().map(|m| m.sup()).fold(1.0, f64::max),
        }
    }

    pub fn decay(&self) -> Decay {
        match self {
            AsymptoticRate::ConstantOne => Decay::Zero,
            AsymptoticRate::Explicit(values) => {
                if values.iter().all(|&v| v == 1.0) {
                    Decay::Zero
                } else {
                    Decay::EventuallyZero
                }
            }
            AsymptoticRate::Power { c, q } => {
                if *c == 0.0 {
                    Decay::Zero
                } else {
                    Decay::Power(*q)
                }
            }
            AsymptoticRate::Max(members) => members
                .iter()
                .map(AsymptoticRate::decay)
                .fold(Decay::Zero, Decay::slowest),
        }
    }
}

impl Decay {
    /// The decay of a sum (or maximum) of two vanishing sequences.
    pub fn slowest(self, other: Decay) -> Decay {
        use Decay::*;
        match (self, other) {
            (Zero, d) | (d, Zero) => d,
            (EventuallyZero, d) | (d, EventuallyZero) => d,
            (Power(a), Power(b)) => Power(a.min(b)),
        }
    }
}

/// Common rate for a finite family: the pointwise maximum of the members' rates.
pub fn family_common_rates<'a, I>(rates: I) -> Result<AsymptoticRate>
where
    I: IntoIterator<Item = &'a AsymptoticRate>,
{
    let mut members: Vec<AsymptoticRate> = Vec::new();
    for rate in rates {
        rate.validate()?;
        match rate {
            AsymptoticRate::Max(inner) => members.extend(inner.iter().cloned()),
            other => members.push(other.clone()),
        }
    }
    if members.is_empty() {
        return Err(Error::InvalidArgument("family must be nonempty".into()));
    }
    if members.iter().all(|m| *m == AsymptoticRate::ConstantOne) {
        return Ok(AsymptoticRate::ConstantOne);
    }
    members.dedup();
    if members.len() == 1 {
        return Ok(members.pop().unwrap());
    }
    Ok(AsymptoticRate::Max(members))
}
