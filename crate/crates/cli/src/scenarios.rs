//! Registered scenarios, addressable by name from configs and the command line.

use aqin_core::schedule::HypothesisSet;
use aqin_core::{ErrorTermSpec, ScheduleParams, SeqSpec, Vector};

use crate::config::{ExperimentConfig, FamilySection};
use crate::Failure;

pub const SCENARIOS: &[(&str, &str)] = &[
    (
        "paper-example-d8",
        "paper_T/paper_I truncated to d = 8, N = 1, beta = beta^ = 0.5, gamma = gamma^ = 0.5 n^-2, seeded errors",
    ),
    (
        "scaled-family-n3",
        "scaled_family(3) at d = 4, same schedule as paper-example-d8",
    ),
    ("identity-d4", "identity pair at d = 4, no errors, x0 declared fixed"),
    ("rotation-d2", "T = rotation(pi/4), I = identity, no errors"),
];

fn family(zoo: Option<&str>, t: &[&str], i: &[&str], dim: usize) -> FamilySection {
    FamilySection {
        zoo: zoo.map(str::to_string),
        t: t.iter().map(|s| s.to_string()).collect(),
        i: i.iter().map(|s| s.to_string()).collect(),
        dim,
        fixed_points: None,
        lambda: None,
        mu: None,
    }
}

/// `beta = beta^ = 0.5`, `gamma = gamma^ = 0.5 n^-2`, errors uniform in the 0.1-ball.
fn summable_schedule() -> ScheduleParams {
    let gamma = SeqSpec::Power { c: 0.5, q: 2.0 };
    ScheduleParams {
        beta: SeqSpec::Constant(0.5),
        gamma: gamma.clone(),
        beta_hat: SeqSpec::Constant(0.5),
        gamma_hat: gamma,
        error_u: ErrorTermSpec::SeededRandom { seed: 1, bound: 0.1 },
        error_v: ErrorTermSpec::SeededRandom { seed: 2, bound: 0.1 },
    }
}

fn errorless_schedule() -> ScheduleParams {
    ScheduleParams {
        beta: SeqSpec::Constant(0.5),
        gamma: SeqSpec::Constant(0.0),
        beta_hat: SeqSpec::Constant(0.5),
        gamma_hat: SeqSpec::Constant(0.0),
        error_u: ErrorTermSpec::Zero,
        error_v: ErrorTermSpec::Zero,
    }
}

fn start(dim: usize) -> Vec<f64> {
    Vector::basis(dim, 0, 0.9).into_inner()
}

pub fn lookup(name: &str) -> Result<ExperimentConfig, Failure> {
    let base = ExperimentConfig {
        name: name.to_string(),
        horizon: 2_000,
        stop_tol: 1e-6,
        inner_tol: 1e-12,
        inner_max: 10_000,
        ..ExperimentConfig::defaults()
    };
    let cfg = match name {
        "paper-example-d8" => ExperimentConfig {
            family: family(Some("paper"), &[], &[], 8),
            schedule: summable_schedule(),
            x0: start(8),
            // powers of the shifts have no uniform Lipschitz constant
            allow_noncontractive: true,
            hypotheses: HypothesisSet::Residual,
            ..base
        },
        "scaled-family-n3" => ExperimentConfig {
            family: family(Some("scaled_family(3)"), &[], &[], 4),
            schedule: summable_schedule(),
            x0: start(4),
            hypotheses: HypothesisSet::Residual,
            ..base
        },
        "identity-d4" => {
            let x0 = vec![0.1, -0.2, 0.3, 0.4];
            let mut fam = family(None, &["identity"], &["identity"], 4);
            fam.fixed_points = Some(vec![Vector::new(x0.clone()).expect("finite"), Vector::zeros(4)]);
            ExperimentConfig {
                family: fam,
                schedule: errorless_schedule(),
                x0,
                horizon: 50,
                ..base
            }
        }
        "rotation-d2" => ExperimentConfig {
            family: family(None, &["rotation"], &["identity"], 2),
            schedule: errorless_schedule(),
            x0: vec![0.6, 0.7],
            horizon: 500,
            hypotheses: HypothesisSet::Residual,
            ..base
        },
        _ => {
            let known: Vec<&str> = SCENARIOS.iter().map(|(n, _)| *n).collect();
            return Err(Failure::config(format!(
                "unknown scenario `{name}` (known: {})",
                known.join(", ")
            )));
        }
    };
    Ok(cfg)
}
