//! Single-operator implicit baselines:
//!
//! * Xu-Ori: `x_n = (1 - a_n) x_{n-1} + a_n T_{j(n)} x_n`
//! * Sun:    `x_n = (1 - a_n) x_{n-1} + a_n T_{j(n)}^{k(n)} x_n`
//!
//! Both reuse the inner Picard machinery. The recorded `b_n` is the
//! one-operator analogue `a_n (mu_k - 1) / (1 - a_n mu_k)` with `c_n = 0`.

use super::inner::{picard, preflight, InnerOptions};
use super::scheme::{digest, RECURRENCE_SLACK};
use super::{IterationTrace, StepRecord, Terminated};
use crate::diagnostics::distance_to_f;
use crate::error::{Error, Result};
use crate::mappings::{family_common_rates, power_apply, AsymptoticRate, MappingSpec};
use crate::schedule::{index_decompose, SeqSpec};
use crate::vectorspace::{convex_combine, distance, Vector};

/// `N` self-maps with a common fixed-point set.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    maps: Vec<MappingSpec>,
    rate: AsymptoticRate,
    common_f: Vec<Vector>,
}

impl OperatorFamily {
    pub fn new(maps: Vec<MappingSpec>, common_f: Vec<Vector>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidArgument("operator family must be nonempty".into()));
        }
        if common_f.is_empty() {
            return Err(Error::EmptyFixedPointSet);
        }
        let dim = maps[0].dim();
        for m in &maps {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            for p in &common_f {
                if distance(&m.apply(p)?, p, m.norm_kind())? > crate::mappings::FIXED_POINT_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "{:?} is not a fixed point of `{}`",
                        p.as_slice(),
                        m.label()
                    )));
                }
            }
        }
        let rate = family_common_rates(maps.iter().map(MappingSpec::rate))?;
        Ok(Self { maps, rate, common_f })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn rate(&self) -> &AsymptoticRate {
        &self.rate
    }

    fn lipschitz(&self) -> Option<f64> {
        self.maps
            .iter()
            .map(MappingSpec::lipschitz)
            .try_fold(0.0f64, |acc, l| l.map(|l| acc.max(l)))
    }
}

#[derive(Clone, Copy)]
enum Powers {
    One,
    Cyclic,
}

fn run_baseline(
    family: &OperatorFamily,
    alpha: &SeqSpec,
    x0: &Vector,
    horizon: usize,
    inner: &InnerOptions,
    powers: Powers,
) -> Result<IterationTrace> {
    alpha.validate()?;
    let kind = family.maps[0].norm_kind();
    if x0.dim() != family.maps[0].dim() {
        return Err(Error::DimensionMismatch {
            expected: family.maps[0].dim(),
            found: x0.dim(),
        });
    }
    let mut steps = Vec::with_capacity(horizon.min(100_000));
    let mut terminated = Terminated::Horizon;
    let mut x_prev = x0.clone();
    for n in 1..=horizon {
        let a = alpha.value(n, "alpha")?;
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha_{n} = {a} is not in (0, 1)")));
        }
        let idx = index_decompose(n, family.len())?;
        let k = match powers {
            Powers::One => 1,
            Powers::Cyclic => idx.k,
        };
        let map = &family.maps[idx.j - 1];
        let bound = family.lipschitz().map_or(f64::INFINITY, |l| a * l);
        let relaxation = preflight(n, bound, inner)?;
        let g = |x: &Vector| -> Result<Vector> {
            let tx = power_apply(map, k, x)?;
            convex_combine(&[1.0 - a, a], &[&x_prev, &tx])
        };
        let (x, report) = picard(g, &x_prev, relaxation, inner, kind)?;
        if !report.converged {
            terminated = Terminated::InnerFailure { n };
            break;
        }

        let mu = family.rate.value(k);
        let b = if a * mu < 1.0 {
            a * (mu - 1.0) / (1.0 - a * mu)
        } else {
            f64::INFINITY
        };
        let mut recurrence_ok = true;
        for p in &family.common_f {
            recurrence_ok &= distance(&x, p, kind)? <= (1.0 + b) * distance(&x_prev, p, kind)? + RECURRENCE_SLACK;
        }
        let residuals_t = family
            .maps
            .iter()
            .map(|m| distance(&x, &m.apply(&x)?, kind))
            .collect::<Result<Vec<_>>>()?;
        steps.push(StepRecord {
            n,
            x: x.clone(),
            y: x.clone(),
            k,
            j: idx.j,
            inner: report,
            residuals_t,
            residuals_i: Vec::new(),
            dist_f: distance_to_f(&x, &family.common_f, kind)?,
            recurrence_b: b,
            recurrence_c: 0.0,
            recurrence_ok,
            y_bound_ok: true,
        });
        x_prev = x;
    }
    let labels: Vec<&str> = family.maps.iter().map(MappingSpec::label).collect();
    let tag = match powers {
        Powers::One => "xu-ori",
        Powers::Cyclic => "sun",
    };
    Ok(IterationTrace {
        x0: x0.clone(),
        steps,
        config_digest: digest(&[&tag, &labels, alpha, x0, &horizon, inner]),
        terminated,
        conditions: None,
    })
}

/// Xu-Ori implicit iteration for a family of nonexpansive maps.
pub fn run_xu_ori(
    family: &OperatorFamily,
    alpha: &SeqSpec,
    x0: &Vector,
    horizon: usize,
    inner: &InnerOptions,
) -> Result<IterationTrace> {
    run_baseline(family, alpha, x0, horizon, inner, Powers::One)
}

/// Sun's implicit iteration with cyclic powers `T_{j(n)}^{k(n)}`.
pub fn run_sun(
    family: &OperatorFamily,
    alpha: &SeqSpec,
    x0: &Vector,
    horizon: usize,
    inner: &InnerOptions,
) -> Result<IterationTrace> {
    run_baseline(family, alpha, x0, horizon, inner, Powers::Cyclic)
}
