//! Prebuilt mappings and families, addressed by stable string names.
//!
//! Parameterised entries take one argument in parentheses, e.g.
//! `linear_contraction(0.5)`, `rotation(0.785)`, `scaled_family(3)`.
//! Without an argument the documented default is used.

use super::{AsymptoticRate, FamilyConfig, MappingSpec};
use crate::error::{Error, Result};
use crate::vectorspace::Vector;

/// Stable zoo names with a one-line description each.
pub const ZOO_NAMES: &[(&str, &str)] = &[
    (
        "paper_T",
        "(x1, x2, ...) -> (0, x1^4, x2^4, ...) on the unit ball, last coordinate dropped",
    ),
    (
        "paper_I",
        "(x1, x2, ...) -> (0, x1^2, x2^2, ...) on the unit ball, last coordinate dropped",
    ),
    ("paper", "family N = 1: T = paper_T, I = paper_I, F = {0}"),
    ("identity", "x -> x on the unit ball, F = {0} declared"),
    (
        "linear_contraction(a)",
        "x -> a x on the unit ball, declared nonexpansive; default a = 0.5",
    ),
    (
        "rotation(theta)",
        "planar rotation by theta (d = 2 only); default theta = pi/4",
    ),
    (
        "scaled_family(N)",
        "N pairs T_j = a_j x, I_j = sqrt(a_j) x with distinct a_j in [0.5, 0.9]; default N = 3",
    ),
];

/// A zoo lookup yields either one mapping or a whole `(T_j, I_j)` family.
#[derive(Debug, Clone)]
pub enum ZooEntry {
    Mapping(MappingSpec),
    Family(FamilyConfig),
}

impl ZooEntry {
    pub fn into_mapping(self) -> Option<MappingSpec> {
        match self {
            ZooEntry::Mapping(m) => Some(m),
            ZooEntry::Family(_) => None,
        }
    }

    pub fn into_family(self) -> Option<FamilyConfig> {
        match self {
            ZooEntry::Family(f) => Some(f),
            ZooEntry::Mapping(_) => None,
        }
    }
}

fn split_name(name: &str) -> Result<(&str, Option<f64>)> {
    let name = name.trim();
    match name.find('(') {
        None => Ok((name, None)),
        Some(open) => {
            let inner = name[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownName(name.to_string()))?;
            let value = inner
                .trim()
                .trim_start_matches("a=")
                .trim_start_matches("N=")
                .trim_start_matches("theta=")
                .parse::<f64>()
                .map_err(|_| Error::UnknownName(name.to_string()))?;
            Ok((&name[..open], Some(value)))
        }
    }
}

/// Look up a zoo entry at dimension `dim`.
pub fn zoo(name: &str, dim: usize) -> Result<ZooEntry> {
    let (base, arg) = split_name(name)?;
    let entry = match (base, arg) {
        ("paper_T", None) => ZooEntry::Mapping(paper_t(dim)?),
        ("paper_I", None) => ZooEntry::Mapping(paper_i(dim)?),
        ("paper", None) => ZooEntry::Family(FamilyConfig::new(
            vec![paper_t(dim)?],
            vec![paper_i(dim)?],
            vec![Vector::zeros(dim)],
        )?),
        ("identity", None) => ZooEntry::Mapping(identity(dim)?),
        ("linear_contraction", a) => ZooEntry::Mapping(linear_contraction(dim, a.unwrap_or(0.5))?),
        ("rotation", theta) => ZooEntry::Mapping(rotation(dim, theta.unwrap_or(std::f64::consts::FRAC_PI_4))?),
        ("scaled_family", n) => {
            let n = n.unwrap_or(3.0);
            if n < 1.0 || n.fract() != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "scaled_family needs a positive integer N, got {n}"
                )));
            }
            ZooEntry::Family(scaled_family(dim, n as usize)?)
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(entry)
}

fn require_dim(dim: usize, min: usize, what: &str) -> Result<()> {
    if dim < min {
        return Err(Error::InvalidArgument(format!(
            "{what} needs dimension >= {min}, got {dim}"
        )));
    }
    Ok(())
}

/// Right shift of coordinatewise powers, truncated to `dim` coordinates.
fn shifted_power(x: &[f64], exponent: i32) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        out[i] = x[i - 1].powi(exponent);
    }
    out
}

// Powers of these shifts have Lipschitz constant 4^n (resp. 2^n) near the
// unit sphere, so no uniform constant is declared.
fn paper_t(dim: usize) -> Result<MappingSpec> {
    require_dim(dim, 2, "paper_T")?;
    MappingSpec::new("paper_T", dim, 1.0, |x| shifted_power(x, 4))?.with_fixed_points(vec![Vector::zeros(dim)])
}

fn paper_i(dim: usize) -> Result<MappingSpec> {
    require_dim(dim, 2, "paper_I")?;
    MappingSpec::new("paper_I", dim, 1.0, |x| shifted_power(x, 2))?.with_fixed_points(vec![Vector::zeros(dim)])
}

fn identity(dim: usize) -> Result<MappingSpec> {
    MappingSpec::new("identity", dim, 1.0, |x| x.to_vec())?
        .with_lipschitz(1.0)?
        .with_fixed_points(vec![Vector::zeros(dim)])
}

fn linear_contraction(dim: usize, a: f64) -> Result<MappingSpec> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    MappingSpec::new(format!("linear_contraction({a})"), dim, 1.0, move |x| {
        x.iter().map(|c| a * c).collect()
    })?
    .with_lipschitz(1.0)?
    .with_rate(AsymptoticRate::ConstantOne)?
    .with_fixed_points(vec![Vector::zeros(dim)])
}

fn rotation(dim: usize, theta: f64) -> Result<MappingSpec> {
    if dim != 2 {
        return Err(Error::InvalidArgument(format!("rotation needs dimension 2, got {dim}")));
    }
    let (s, c) = theta.sin_cos();
    MappingSpec::new(format!("rotation({theta})"), 2, 1.0, move |x| {
        vec![c * x[0] - s * x[1], s * x[0] + c * x[1]]
    })?
    .with_lipschitz(1.0)?
    .with_fixed_points(vec![Vector::zeros(2)])
}

fn scaled_family(dim: usize, n: usize) -> Result<FamilyConfig> {
    let factors: Vec<f64> = (0..n)
        .map(|j| {
            if n == 1 {
                0.5
            } else {
                0.5 + 0.4 * j as f64 / (n - 1) as f64
            }
        })
        .collect();
    let t = factors
        .iter()
        .map(|&a| linear_contraction(dim, a))
        .collect::<Result<Vec<_>>>()?;
    let i = factors
        .iter()
        .map(|&a| linear_contraction(dim, a.sqrt()))
        .collect::<Result<Vec<_>>>()?;
    FamilyConfig::new(t, i, vec![Vector::zeros(dim)])
}

/// The pair `x0 = (1, 0, ...)`, `y0 = (1/2, 0, ...)` separating `paper_T`
/// from `I`-nonexpansivity.
pub fn witness_pair(dim: usize) -> (Vector, Vector) {
    (Vector::basis(dim, 0, 1.0), Vector::basis(dim, 0, 0.5))
}
