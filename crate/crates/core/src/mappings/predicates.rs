//! Sampled checks of the nonexpansivity-type inequalities.
//!
//! The definitions quantify over the whole domain, so every check here is
//! falsification-oriented: a failing report carries a concrete witness, a
//! passing one is only evidence over the seeded sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{power_apply, AsymptoticRate, FamilyConfig, MappingSpec};
use crate::error::{Error, Result};
use crate::vectorspace::{distance, norm, NormKind, Vector};

/// Slack allowed on the right-hand side of every sampled inequality.
pub const CHECK_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    /// Largest power `n` tested.
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            n_max: 5,
            samples: 500,
            seed: 0,
        }
    }
}

/// The input that produced the worst observed violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: Vector,
    pub y: Option<Vector>,
    pub p: Option<Vector>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateReport {
    pub holds: bool,
    /// `max(lhs - rhs)` over every tested instance; `<= 0` means strict evidence.
    pub worst_violation: f64,
    /// Set only when `holds` is false.
    pub witness: Option<Witness>,
    pub instances: usize,
}

struct Tally {
    worst: f64,
    worst_at: Option<Witness>,
    instances: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            worst: f64::NEG_INFINITY,
            worst_at: None,
            instances: 0,
        }
    }

    fn record(&mut self, gap: f64, witness: impl FnOnce() -> Witness) {
        self.instances += 1;
        if gap > self.worst {
            self.worst = gap;
            self.worst_at = Some(witness());
        }
    }

    fn finish(self) -> PredicateReport {
        let holds = self.worst <= CHECK_SLACK;
        PredicateReport {
            holds,
            worst_violation: self.worst,
            witness: if holds { None } else { self.worst_at },
            instances: self.instances,
        }
    }
}

/// `count` seeded points uniformly distributed in the `l2` ball of `radius`,
/// pulled back into the `kind` ball when that is smaller.
pub fn sample_ball(dim: usize, radius: f64, count: usize, seed: u64, kind: NormKind) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let len = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let u: f64 = rng.random();
            let r = radius * u.powf(1.0 / dim as f64);
            let v = Vector::new(dir.iter().map(|c| c * r / len).collect()).expect("finite sample");
            let n = norm(&v, kind).expect("finite sample");
            if n > radius {
                v.scale(radius / n)
            } else {
                v
            }
        })
        .collect()
}

fn check_shapes(t: &MappingSpec, i: &MappingSpec) -> Result<()> {
    if t.dim() != i.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: i.dim(),
        });
    }
    Ok(())
}

fn domain_samples(t: &MappingSpec, i: &MappingSpec, count: usize, seed: u64) -> Vec<Vector> {
    let radius = t.domain_radius().min(i.domain_radius());
    sample_ball(t.dim(), radius, count, seed, t.norm_kind())
}

/// `||T^n x - p|| <= mu_n ||I^n x - p||` for sampled `x`, `p` in `fixed`, `n <= n_max`.
pub fn check_quasi_i_nonexpansive(
    t: &MappingSpec,
    i: &MappingSpec,
    fixed: &[Vector],
    mu: &AsymptoticRate,
    cfg: SampleConfig,
) -> Result<PredicateReport> {
    check_shapes(t, i)?;
    if fixed.is_empty() {
        return Err(Error::EmptyFixedPointSet);
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let kind = t.norm_kind();
    let mut tally = Tally::new();
    for x in domain_samples(t, i, cfg.samples, cfg.seed) {
        let mut tx = x.clone();
        let mut ix = x.clone();
        for n in 1..=cfg.n_max {
            tx = power_apply(t, 1, &tx)?;
            ix = power_apply(i, 1, &ix)?;
            for p in fixed {
                let gap = distance(&tx, p, kind)? - mu.value(n) * distance(&ix, p, kind)?;
                tally.record(gap, || Witness {
                    x: x.clone(),
                    y: None,
                    p: Some(p.clone()),
                    n,
                });
            }
        }
    }
    Ok(tally.finish())
}

/// Quasi-nonexpansivity of `m` itself: `||m^n x - p|| <= rate_n ||x - p||`.
pub fn check_quasi_nonexpansive(
    m: &MappingSpec,
    fixed: &[Vector],
    rate: &AsymptoticRate,
    cfg: SampleConfig,
) -> Result<PredicateReport> {
    if fixed.is_empty() {
        return Err(Error::EmptyFixedPointSet);
    }
    let kind = m.norm_kind();
    let mut tally = Tally::new();
    for x in domain_samples(m, m, cfg.samples, cfg.seed) {
        let mut mx = x.clone();
        for n in 1..=cfg.n_max {
            mx = power_apply(m, 1, &mx)?;
            for p in fixed {
                let gap = distance(&mx, p, kind)? - rate.value(n) * distance(&x, p, kind)?;
                tally.record(gap, || Witness {
                    x: x.clone(),
                    y: None,
                    p: Some(p.clone()),
                    n,
                });
            }
        }
    }
    Ok(tally.finish())
}

/// `||T^n x - T^n y|| <= lambda_n ||I^n x - I^n y||` over the given pairs.
pub fn check_pairs_i_nonexpansive(
    t: &MappingSpec,
    i: &MappingSpec,
    lambda: &AsymptoticRate,
    n_max: usize,
    pairs: &[(Vector, Vector)],
) -> Result<PredicateReport> {
    check_shapes(t, i)?;
    let kind = t.norm_kind();
    let mut tally = Tally::new();
    for (x, y) in pairs {
        let (mut tx, mut ty, mut ix, mut iy) = (x.clone(), y.clone(), x.clone(), y.clone());
        for n in 1..=n_max {
            tx = power_apply(t, 1, &tx)?;
            ty = power_apply(t, 1, &ty)?;
            ix = power_apply(i, 1, &ix)?;
            iy = power_apply(i, 1, &iy)?;
            let gap = distance(&tx, &ty, kind)? - lambda.value(n) * distance(&ix, &iy, kind)?;
            tally.record(gap, || Witness {
                x: x.clone(),
                y: Some(y.clone()),
                p: None,
                n,
            });
        }
    }
    Ok(tally.finish())
}

fn sample_pairs(t: &MappingSpec, i: &MappingSpec, samples: usize, seed: u64) -> Vec<(Vector, Vector)> {
    let pts = domain_samples(t, i, 2 * samples, seed);
    pts.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())).collect()
}

/// Asymptotic `I`-nonexpansivity over `samples` seeded pairs.
pub fn check_asymptotically_i_nonexpansive(
    t: &MappingSpec,
    i: &MappingSpec,
    lambda: &AsymptoticRate,
    cfg: SampleConfig,
) -> Result<PredicateReport> {
    check_shapes(t, i)?;
    check_pairs_i_nonexpansive(t, i, lambda, cfg.n_max, &sample_pairs(t, i, cfg.samples, cfg.seed))
}

/// `||Tx - Ty|| <= ||Ix - Iy||` over `samples` seeded pairs.
pub fn check_i_nonexpansive(t: &MappingSpec, i: &MappingSpec, samples: usize, seed: u64) -> Result<PredicateReport> {
    check_asymptotically_i_nonexpansive(
        t,
        i,
        &AsymptoticRate::ConstantOne,
        SampleConfig {
            n_max: 1,
            samples,
            seed,
        },
    )
}

/// `||m^n x - m^n y|| <= L ||x - y||` for sampled pairs and `n <= n_max`.
pub fn check_uniform_lipschitz(m: &MappingSpec, lipschitz: f64, cfg: SampleConfig) -> Result<PredicateReport> {
    if lipschitz.is_nan() || lipschitz <= 0.0 {
        return Err(Error::InvalidArgument(format!("L must be positive, got {lipschitz}")));
    }
    let kind = m.norm_kind();
    let mut tally = Tally::new();
    for (x, y) in sample_pairs(m, m, cfg.samples, cfg.seed) {
        let base = distance(&x, &y, kind)?;
        let (mut mx, mut my) = (x.clone(), y.clone());
        for n in 1..=cfg.n_max {
            mx = power_apply(m, 1, &mx)?;
            my = power_apply(m, 1, &my)?;
            let gap = distance(&mx, &my, kind)? - lipschitz * base;
            tally.record(gap, || Witness {
                x: x.clone(),
                y: Some(y.clone()),
                p: None,
                n,
            });
        }
    }
    Ok(tally.finish())
}

/// Sampled self-map check: every power up to `n_max` stays in the domain ball.
pub fn check_self_map(m: &MappingSpec, cfg: SampleConfig) -> Result<PredicateReport> {
    let kind = m.norm_kind();
    let mut tally = Tally::new();
    for x in domain_samples(m, m, cfg.samples, cfg.seed) {
        let mut mx = x.clone();
        for n in 1..=cfg.n_max {
            mx = m.apply(&mx)?;
            let gap = norm(&mx, kind)? - m.domain_radius();
            tally.record(gap, || Witness {
                x: x.clone(),
                y: None,
                p: None,
                n,
            });
            if gap > CHECK_SLACK {
                break;
            }
        }
    }
    Ok(tally.finish())
}

/// One named check inside a classification run.
#[derive(Debug, Clone)]
pub struct Classification {
    pub property: String,
    /// Whether the zoo entry declares this property. Failing an undeclared
    /// property is informational.
    pub declared: bool,
    pub report: PredicateReport,
}

impl Classification {
    pub fn falsified(&self) -> bool {
        self.declared && !self.report.holds
    }
}

fn outcome(property: String, declared: bool, report: Result<PredicateReport>) -> Result<Classification> {
    let report = match report {
        Ok(r) => r,
        // an escaping iterate falsifies the self-map property behind the check
        Err(Error::DomainViolation { norm, radius, .. }) => PredicateReport {
            holds: false,
            worst_violation: norm - radius,
            witness: None,
            instances: 0,
        },
        Err(e) => return Err(e),
    };
    Ok(Classification {
        property,
        declared,
        report,
    })
}

/// Run every predicate relevant to a single mapping.
pub fn classify_mapping(m: &MappingSpec, cfg: SampleConfig) -> Result<Vec<Classification>> {
    let label = m.label();
    let mut out = vec![outcome(
        format!("{label}: self-map of the domain ball"),
        true,
        check_self_map(m, cfg),
    )?];
    if !m.fixed_points().is_empty() {
        out.push(outcome(
            format!("{label}: asymptotically quasi-nonexpansive"),
            true,
            check_quasi_nonexpansive(m, m.fixed_points(), m.rate(), cfg),
        )?);
    }
    if let Some(l) = m.lipschitz() {
        out.push(outcome(
            format!("{label}: uniformly {l}-Lipschitzian"),
            true,
            check_uniform_lipschitz(m, l, cfg),
        )?);
        if l <= 1.0 {
            let id = MappingSpec::new("identity", m.dim(), m.domain_radius(), |x| x.to_vec())?;
            out.push(outcome(
                format!("{label}: nonexpansive"),
                true,
                check_i_nonexpansive(m, &id, cfg.samples, cfg.seed),
            )?);
        }
    }
    Ok(out)
}

/// Run every predicate relevant to each pair `(T_j, I_j)` of a family.
///
/// Declared properties: self-maps, `T_j` asymptotically quasi
/// `I_j`-nonexpansive with the common `lambda`, `I_j` asymptotically
/// quasi-nonexpansive with the common `mu`, and any declared uniform
/// Lipschitz constants. `I`-nonexpansivity is reported but not declared.
pub fn classify_family(family: &FamilyConfig, cfg: SampleConfig) -> Result<Vec<Classification>> {
    let mut out = Vec::new();
    for j in 1..=family.len() {
        let (t, i) = (family.t(j), family.i(j));
        let (tl, il) = (t.label(), i.label());
        out.push(outcome(
            format!("T_{j} = {tl}: self-map"),
            true,
            check_self_map(t, cfg),
        )?);
        out.push(outcome(
            format!("I_{j} = {il}: self-map"),
            true,
            check_self_map(i, cfg),
        )?);
        out.push(outcome(
            format!("T_{j}: asymptotically quasi I_{j}-nonexpansive"),
            true,
            check_quasi_i_nonexpansive(t, i, family.common_f(), family.lambda(), cfg),
        )?);
        out.push(outcome(
            format!("I_{j}: asymptotically quasi-nonexpansive"),
            true,
            check_quasi_nonexpansive(i, family.common_f(), family.mu(), cfg),
        )?);
        out.push(outcome(
            format!("T_{j}: I_{j}-nonexpansive"),
            false,
            check_i_nonexpansive(t, i, cfg.samples, cfg.seed),
        )?);
        out.push(outcome(
            format!("T_{j}: asymptotically I_{j}-nonexpansive"),
            false,
            check_asymptotically_i_nonexpansive(t, i, family.lambda(), cfg),
        )?);
        for (name, m) in [(format!("T_{j}"), t), (format!("I_{j}"), i)] {
            if let Some(l) = m.lipschitz() {
                out.push(outcome(
                    format!("{name}: uniformly {l}-Lipschitzian"),
                    true,
                    check_uniform_lipschitz(m, l, cfg),
                )?);
            }
        }
    }
    Ok(out)
}
