//! Self-maps of a closed ball, their iterated powers, and finite families
//! of `(T_j, I_j)` pairs sharing a common fixed-point set.

mod predicates;
mod rate;
mod zoo;

use std::fmt;
use std::sync::Arc;

pub use predicates::{
    check_asymptotically_i_nonexpansive, check_i_nonexpansive, check_pairs_i_nonexpansive, check_quasi_i_nonexpansive,
    check_quasi_nonexpansive, check_self_map, check_uniform_lipschitz, classify_family, classify_mapping, sample_ball,
    Classification, PredicateReport, SampleConfig, Witness, CHECK_SLACK,
};
pub use rate::{family_common_rates, AsymptoticRate, Decay};
pub use zoo::{witness_pair, zoo, ZooEntry, ZOO_NAMES};

use crate::error::{Error, Result};
use crate::vectorspace::{distance, norm, NormKind, Vector};

/// Slack allowed when an iterate is tested against the domain ball.
pub const DOMAIN_SLACK: f64 = 1e-9;

/// Tolerance for declared fixed points: `||m(p) - p|| <= FIXED_POINT_TOL`.
pub const FIXED_POINT_TOL: f64 = 1e-10;

pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A self-map of the closed ball `{ ||x|| <= domain_radius }` in dimension `dim`.
///
/// `apply` must be pure. `lipschitz`, when declared, bounds every power
/// `m^n` uniformly. `rate` is the asymptotic rate attached to the mapping's
/// role in a family (quasi `I`-nonexpansive for `T_j`, quasi-nonexpansive
/// for `I_j`).
#[derive(Clone)]
pub struct MappingSpec {
    apply: MapFn,
    dim: usize,
    domain_radius: f64,
    lipschitz: Option<f64>,
    rate: AsymptoticRate,
    fixed_points: Vec<Vector>,
    label: String,
    norm: NormKind,
}

impl fmt::Debug for MappingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MappingSpec")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain_radius", &self.domain_radius)
            .field("lipschitz", &self.lipschitz)
            .field("rate", &self.rate)
            .field("fixed_points", &self.fixed_points)
            .finish_non_exhaustive()
    }
}

impl MappingSpec {
    pub fn new<F>(label: impl Into<String>, dim: usize, domain_radius: f64, apply: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if !(domain_radius > 0.0 && domain_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "domain radius must be positive, got {domain_radius}"
            )));
        }
        Ok(Self {
            apply: Arc::new(apply),
            dim,
            domain_radius,
            lipschitz: None,
            rate: AsymptoticRate::ConstantOne,
            fixed_points: Vec::new(),
            label: label.into(),
            norm: NormKind::L2,
        })
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Result<Self> {
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Lipschitz constant must be positive, got {lipschitz}"
            )));
        }
        self.lipschitz = Some(lipschitz);
        Ok(self)
    }

    pub fn with_rate(mut self, rate: AsymptoticRate) -> Result<Self> {
        rate.validate()?;
        self.rate = rate;
        Ok(self)
    }

    pub fn with_norm(mut self, norm: NormKind) -> Result<Self> {
        self.norm = norm.validate()?;
        Ok(self)
    }

    /// Declare known fixed points. Each must satisfy `||m(p) - p|| <= 1e-10`.
    pub fn with_fixed_points(mut self, points: Vec<Vector>) -> Result<Self> {
        for p in &points {
            let image = self.apply(p)?;
            let gap = distance(&image, p, self.norm)?;
            if gap > FIXED_POINT_TOL {
                return Err(Error::InvalidArgument(format!(
                    "declared fixed point {:?} of `{}` moves by {gap}",
                    p.as_slice(),
                    self.label
                )));
            }
        }
        self.fixed_points = points;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn rate(&self) -> &AsymptoticRate {
        &self.rate
    }

    pub fn fixed_points(&self) -> &[Vector] {
        &self.fixed_points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    /// One application of the map, without a domain check.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        let out = (self.apply)(x.as_slice());
        if out.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: out.len(),
            });
        }
        Vector::new(out)
    }

    fn check_in_domain(&self, x: &Vector, power: usize) -> Result<()> {
        let r = norm(x, self.norm)?;
        if r > self.domain_radius + DOMAIN_SLACK {
            return Err(Error::DomainViolation {
                label: self.label.clone(),
                norm: r,
                radius: self.domain_radius,
                power,
            });
        }
        Ok(())
    }
}

/// `m^k(x)`: the `k`-fold composition of `m` applied to `x`.
///
/// Every intermediate iterate is checked against the domain ball. Once an
/// iterate is mapped exactly onto itself the remaining compositions are
/// skipped, since a pure map keeps returning the same value.
pub fn power_apply(m: &MappingSpec, k: usize, x: &Vector) -> Result<Vector> {
    if k == 0 {
        return Err(Error::InvalidArgument("power must be >= 1".into()));
    }
    m.check_in_domain(x, 0)?;
    let mut current = x.clone();
    for power in 1..=k {
        let next = m.apply(&current)?;
        m.check_in_domain(&next, power)?;
        if next == current {
            return Ok(next);
        }
        current = next;
    }
    Ok(current)
}

/// `N` pairs `(T_j, I_j)` with common rates and declared common fixed points.
#[derive(Debug, Clone)]
pub struct FamilyConfig {
    t_family: Vec<MappingSpec>,
    i_family: Vec<MappingSpec>,
    common_lambda: AsymptoticRate,
    common_mu: AsymptoticRate,
    common_f: Vec<Vector>,
    norm: NormKind,
}

impl FamilyConfig {
    /// Build a family whose common rates are the pointwise maxima of the
    /// members' declared rates.
    pub fn new(t_family: Vec<MappingSpec>, i_family: Vec<MappingSpec>, common_f: Vec<Vector>) -> Result<Self> {
        let lambda = family_common_rates(t_family.iter().map(MappingSpec::rate))?;
        let mu = family_common_rates(i_family.iter().map(MappingSpec::rate))?;
        Self::with_rates(t_family, i_family, lambda, mu, common_f)
    }

    pub fn with_rates(
        t_family: Vec<MappingSpec>,
        i_family: Vec<MappingSpec>,
        common_lambda: AsymptoticRate,
        common_mu: AsymptoticRate,
        common_f: Vec<Vector>,
    ) -> Result<Self> {
        if t_family.is_empty() || t_family.len() != i_family.len() {
            return Err(Error::InvalidArgument(format!(
                "need N >= 1 pairs, got {} T maps and {} I maps",
                t_family.len(),
                i_family.len()
            )));
        }
        if common_f.is_empty() {
            return Err(Error::EmptyFixedPointSet);
        }
        common_lambda.validate()?;
        common_mu.validate()?;
        let dim = t_family[0].dim();
        let norm = t_family[0].norm_kind();
        for m in t_family.iter().chain(&i_family) {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            for p in &common_f {
                let gap = distance(&m.apply(p)?, p, norm)?;
                if gap > FIXED_POINT_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "{:?} is not a fixed point of `{}` (moves by {gap})",
                        p.as_slice(),
                        m.label()
                    )));
                }
            }
        }
        Ok(Self {
            t_family,
            i_family,
            common_lambda,
            common_mu,
            common_f,
            norm,
        })
    }

    /// Number of pairs `N`.
    pub fn len(&self) -> usize {
        self.t_family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_family.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.t_family[0].dim()
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn t(&self, j: usize) -> &MappingSpec {
        &self.t_family[j - 1]
    }

    pub fn i(&self, j: usize) -> &MappingSpec {
        &self.i_family[j - 1]
    }

    pub fn t_family(&self) -> &[MappingSpec] {
        &self.t_family
    }

    pub fn i_family(&self) -> &[MappingSpec] {
        &self.i_family
    }

    pub fn lambda(&self) -> &AsymptoticRate {
        &self.common_lambda
    }

    pub fn mu(&self) -> &AsymptoticRate {
        &self.common_mu
    }

    pub fn common_f(&self) -> &[Vector] {
        &self.common_f
    }

    /// Radius of the ball every member maps into itself.
    pub fn domain_radius(&self) -> f64 {
        self.t_family
            .iter()
            .chain(&self.i_family)
            .map(MappingSpec::domain_radius)
            .fold(f64::INFINITY, f64::min)
    }

    /// Common uniform Lipschitz constant `L1` of the `T_j`, if all are declared.
    pub fn lipschitz_t(&self) -> Option<f64> {
        common_lipschitz(&self.t_family)
    }

    /// Common uniform Lipschitz constant `L2` of the `I_j`, if all are declared.
    pub fn lipschitz_i(&self) -> Option<f64> {
        common_lipschitz(&self.i_family)
    }
}

fn common_lipschitz(maps: &[MappingSpec]) -> Option<f64> {
    maps.iter()
        .map(MappingSpec::lipschitz)
        .try_fold(0.0f64, |acc, l| l.map(|l| acc.max(l)))
}
