//! Finite-dimensional normed-space kernel.
//!
//! Vectors are dense `f64` coordinate lists. The default norm is the
//! Euclidean one, the finite truncation of `l2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the weight sum of a convex combination.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A point of a finite-dimensional normed space with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("vector dimension must be >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be >= 1");
        Self(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector scaled by `value`.
    pub fn basis(dim: usize, i: usize, value: f64) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = value;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self, t: f64) -> Self {
        Self(self.0.iter().map(|c| t * c).collect())
    }

    /// Componentwise `self - other`.
    pub fn sub(&self, other: &Vector) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// Componentwise `self + t * other`.
    pub fn add_scaled(&self, t: f64, other: &Vector) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + t * b).collect()))
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Which norm to measure with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    L2,
    /// `l_p` with `p > 1`.
    Lp(f64),
    /// Max norm. Not uniformly convex; diagnostics only.
    Linf,
}

impl NormKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            NormKind::Lp(p) if !(p > 1.0 && p.is_finite()) => Err(Error::InvalidArgument(format!(
                "l_p norm requires 1 < p < inf, got p = {p}"
            ))),
            other => Ok(other),
        }
    }

    pub fn is_uniformly_convex(self) -> bool {
        !matches!(self, NormKind::Linf)
    }
}

fn check_dims(a: &Vector, b: &Vector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn norm_of(coords: &[f64], kind: NormKind) -> f64 {
    match kind {
        NormKind::L2 => coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
        NormKind::Lp(p) => coords.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(p.recip()),
        NormKind::Linf => coords.iter().fold(0.0, |m, c| m.max(c.abs())),
    }
}

pub fn norm(v: &Vector, kind: NormKind) -> Result<f64> {
    let kind = kind.validate()?;
    if !v.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(norm_of(v.as_slice(), kind))
}

pub fn distance(a: &Vector, b: &Vector, kind: NormKind) -> Result<f64> {
    let kind = kind.validate()?;
    check_dims(a, b)?;
    let diff: Vec<f64> = a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect();
    let d = norm_of(&diff, kind);
    if !d.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(d)
}

/// Weighted sum `sum_i w_i p_i` with nonnegative weights summing to one.
pub fn convex_combine(weights: &[f64], points: &[&Vector]) -> Result<Vector> {
    if weights.len() != points.len() || points.is_empty() {
        return Err(Error::NotConvex(format!(
            "{} weights for {} points",
            weights.len(),
            points.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::NotConvex(format!("weight {w} is negative or non-finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::NotConvex(format!("weights sum to {total}")));
    }
    let dim = points[0].dim();
    let mut out = vec![0.0; dim];
    for (w, p) in weights.iter().zip(points) {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        if *w == 0.0 {
            continue;
        }
        for (o, c) in out.iter_mut().zip(p.as_slice()) {
            *o += w * c;
        }
    }
    Vector::new(out)
}
