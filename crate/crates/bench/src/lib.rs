//! Fixtures shared by the criterion benches.

use aqin_core::mappings::zoo;
use aqin_core::{ErrorTermSpec, FamilyConfig, ScheduleParams, SeqSpec, Vector};

/// The `paper_T`/`paper_I` pair at dimension `d` with `F = {0}`.
pub fn paper_family(d: usize) -> FamilyConfig {
    zoo("paper", d)
        .ok()
        .and_then(|e| e.into_family())
        .expect("paper family is in the zoo")
}

/// `scaled_family(N)` at dimension `d`.
pub fn scaled_family(n: usize, d: usize) -> FamilyConfig {
    zoo(&format!("scaled_family({n})"), d)
        .ok()
        .and_then(|e| e.into_family())
        .expect("scaled family is in the zoo")
}

/// `beta = beta^ = 0.5`, `gamma = gamma^ = 0.1 n^-2`, seeded errors.
pub fn summable_schedule(seed: u64) -> ScheduleParams {
    let gamma = SeqSpec::Power { c: 0.1, q: 2.0 };
    ScheduleParams {
        beta: SeqSpec::Constant(0.5),
        gamma: gamma.clone(),
        beta_hat: SeqSpec::Constant(0.5),
        gamma_hat: gamma,
        error_u: ErrorTermSpec::SeededRandom { seed, bound: 0.1 },
        error_v: ErrorTermSpec::SeededRandom {
            seed: seed.wrapping_add(1),
            bound: 0.1,
        },
    }
}

pub fn start(d: usize) -> Vector {
    Vector::basis(d, 0, 0.9)
}
