use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vectorspace::{norm, NormKind, Vector};

/// A coefficient sequence with values in `[0, 1]`, indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqSpec {
    Constant(f64),
    /// `c * n^(-q)`.
    Power {
        c: f64,
        q: f64,
    },
    /// Values for `n = 1..=len`; a run may not go past the end.
    Explicit(Vec<f64>),
}

/// Asymptotic class of a sequence, for symbolic summability decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum SeqDecay {
    Zero,
    /// Comparable to `n^(-q)`; `q = 0` for a positive constant.
    Power(f64),
    /// Finite list: the tail is unknown.
    Unknown,
}

/// A sup or inf, and whether it covers every index the sequence defines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub complete: bool,
}

fn in_unit_interval(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

impl SeqSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SeqSpec::Constant(c) if !in_unit_interval(*c) => {
                Err(Error::InvalidArgument(format!("constant {c} outside [0, 1]")))
            }
            SeqSpec::Power { c, q } => {
                if !in_unit_interval(*c) {
                    return Err(Error::InvalidArgument(format!("power coefficient {c} outside [0, 1]")));
                }
                if !(*q >= 0.0 && q.is_finite()) {
                    return Err(Error::InvalidArgument(format!("power exponent {q} must be >= 0")));
                }
                Ok(())
            }
            SeqSpec::Explicit(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidArgument("explicit sequence is empty".into()));
                }
                match values.iter().find(|v| !in_unit_interval(**v)) {
                    Some(v) => Err(Error::InvalidArgument(format!("explicit value {v} outside [0, 1]"))),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Value at `n >= 1`. `role` names the sequence in the exhaustion error.
    pub fn value(&self, n: usize, role: &str) -> Result<f64> {
        debug_assert!(n >= 1);
        match self {
            SeqSpec::Constant(c) => Ok(*c),
            SeqSpec::Power { c, q } => Ok(c * (n as f64).powf(-q)),
            SeqSpec::Explicit(values) => values.get(n - 1).copied().ok_or_else(|| Error::SequenceExhausted {
                role: role.to_string(),
                n,
                len: values.len(),
            }),
        }
    }

    /// Number of defined terms, `None` for infinite forms.
    pub fn explicit_len(&self) -> Option<usize> {
        match self {
            SeqSpec::Explicit(values) => Some(values.len()),
            _ => None,
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, SeqSpec::Explicit(_))
    }

    /// `sup_n` of the sequence; explicit lists are scanned up to `horizon`.
    pub fn sup(&self, horizon: usize) -> Extremum {
        match self {
            SeqSpec::Constant(c) => Extremum {
                value: *c,
                complete: true,
            },
            // nonincreasing, attained at n = 1
            SeqSpec::Power { c, .. } => Extremum {
                value: *c,
                complete: true,
            },
            SeqSpec::Explicit(values) => {
                let seen = &values[..horizon.min(values.len())];
                Extremum {
                    value: seen.iter().copied().fold(0.0, f64::max),
                    complete: seen.len() == values.len(),
                }
            }
        }
    }

    /// `inf_n` of the sequence; explicit lists are scanned up to `horizon`.
    pub fn inf(&self, horizon: usize) -> Extremum {
        match self {
            SeqSpec::Constant(c) => Extremum {
                value: *c,
                complete: true,
            },
            SeqSpec::Power { c, q } => Extremum {
                value: if *q > 0.0 { 0.0 } else { *c },
                complete: true,
            },
            SeqSpec::Explicit(values) => {
                let seen = &values[..horizon.min(values.len())];
                Extremum {
                    value: seen.iter().copied().fold(1.0, f64::min),
                    complete: seen.len() == values.len(),
                }
            }
        }
    }

    pub(crate) fn decay(&self) -> SeqDecay {
        match self {
            SeqSpec::Constant(c) if *c == 0.0 => SeqDecay::Zero,
            SeqSpec::Constant(_) => SeqDecay::Power(0.0),
            SeqSpec::Power { c, .. } if *c == 0.0 => SeqDecay::Zero,
            SeqSpec::Power { q, .. } => SeqDecay::Power(*q),
            SeqSpec::Explicit(_) => SeqDecay::Unknown,
        }
    }
}

/// Bounded perturbation sequence `{u_n}` or `{v_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorTermSpec {
    Zero,
    /// Uniform in the ball of radius `min(bound, radius)`, keyed by `(seed, n)`.
    SeededRandom {
        seed: u64,
        bound: f64,
    },
    /// `u_1, u_2, ...`; a run may not go past the end.
    Explicit(Vec<Vector>),
}

impl ErrorTermSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ErrorTermSpec::SeededRandom { bound, .. } if !(*bound >= 0.0 && bound.is_finite()) => Err(
                Error::InvalidArgument(format!("error-term bound {bound} must be finite and >= 0")),
            ),
            ErrorTermSpec::Explicit(list) if list.is_empty() => {
                Err(Error::InvalidArgument("explicit error-term list is empty".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn explicit_len(&self) -> Option<usize> {
        match self {
            ErrorTermSpec::Explicit(list) => Some(list.len()),
            _ => None,
        }
    }
}

/// The `n`-th error vector in dimension `dim`, inside the ball of `radius`.
pub fn generate_error_term(spec: &ErrorTermSpec, n: usize, dim: usize, radius: f64) -> Result<Vector> {
    if n == 0 {
        return Err(Error::InvalidArgument("error terms are indexed from n = 1".into()));
    }
    match spec {
        ErrorTermSpec::Zero => Ok(Vector::zeros(dim)),
        ErrorTermSpec::SeededRandom { seed, bound } => {
            spec.validate()?;
            let r_max = bound.min(radius);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            rng.set_stream(n as u64);
            let dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let len = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            let u: f64 = rng.random();
            if len == 0.0 || r_max == 0.0 {
                return Ok(Vector::zeros(dim));
            }
            // shrink by a hair so rounding never lands outside the ball
            let r = r_max * u.powf(1.0 / dim as f64) * (1.0 - 1e-15);
            Vector::new(dir.iter().map(|c| c * r / len).collect())
        }
        ErrorTermSpec::Explicit(list) => {
            let v = list
                .get(n - 1)
                .ok_or(Error::ErrorTermExhausted { n, len: list.len() })?;
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            let r = norm(v, NormKind::L2)?;
            if r > radius {
                return Err(Error::InvalidArgument(format!(
                    "error term u_{n} has norm {r} outside the feasible ball of radius {radius}"
                )));
            }
            Ok(v.clone())
        }
    }
}
