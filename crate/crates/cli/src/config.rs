//! Experiment configuration files.
//!
//! A config names a registered scenario, describes an experiment inline, or
//! both; inline fields then override the scenario's values. See
//! `configs/` for examples.

use std::path::Path;

use aqin_core::mappings::{zoo, ZooEntry};
use aqin_core::schedule::HypothesisSet;
use aqin_core::solver::{InnerOptions, RunOptions};
use aqin_core::{AsymptoticRate, ErrorTermSpec, FamilyConfig, MappingSpec, ScheduleParams, Vector};
use serde::{Deserialize, Serialize};

use crate::scenarios;
use crate::Failure;

/// The operator family: a zoo family, or explicit `T_j`/`I_j` name lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zoo: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub i: Vec<String>,
    pub dim: usize,
    /// Common fixed points; `{0}` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_points: Option<Vec<Vector>>,
    /// Declared common rates, replacing the members' own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<AsymptoticRate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<AsymptoticRate>,
}

/// On-disk shape. Every field is optional so a scenario can be overridden piecemeal.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    pub family: Option<FamilySection>,
    pub schedule: Option<ScheduleParams>,
    pub x0: Option<Vec<f64>>,
    pub horizon: Option<usize>,
    pub stop_tol: Option<f64>,
    pub inner_tol: Option<f64>,
    pub inner_max: Option<usize>,
    pub seed: Option<u64>,
    pub allow_noncontractive: Option<bool>,
    pub validation_horizon: Option<usize>,
    pub hypotheses: Option<HypothesisSet>,
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub family: FamilySection,
    pub schedule: ScheduleParams,
    pub x0: Vec<f64>,
    pub horizon: usize,
    pub stop_tol: f64,
    pub inner_tol: f64,
    pub inner_max: usize,
    pub allow_noncontractive: bool,
    pub validation_horizon: usize,
    pub hypotheses: HypothesisSet,
}

/// Command-line overrides applied after the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub allow_noncontractive: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| Failure::config(format!("invalid config: {e}")))?;
        Self::resolve(file)
    }

    pub fn resolve(file: ConfigFile) -> Result<Self, Failure> {
        let mut cfg = match &file.scenario {
            Some(name) => scenarios::lookup(name)?,
            None => {
                let missing = |what: &str| Failure::config(format!("config without a scenario needs `{what}`"));
                ExperimentConfig {
                    name: "inline".into(),
                    family: file.family.clone().ok_or_else(|| missing("family"))?,
                    schedule: file.schedule.clone().ok_or_else(|| missing("schedule"))?,
                    x0: file.x0.clone().ok_or_else(|| missing("x0"))?,
                    ..Self::defaults()
                }
            }
        };
        if file.scenario.is_some() {
            if let Some(f) = file.family {
                cfg.family = f;
            }
            if let Some(s) = file.schedule {
                cfg.schedule = s;
            }
            if let Some(x0) = file.x0 {
                cfg.x0 = x0;
            }
        }
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = file.$field { cfg.$field = v; } )* };
        }
        take!(
            horizon,
            stop_tol,
            inner_tol,
            inner_max,
            allow_noncontractive,
            validation_horizon,
            hypotheses
        );
        if let Some(seed) = file.seed {
            cfg.reseed(seed);
        }
        Ok(cfg)
    }

    /// Values used by inline configs for everything but family, schedule and `x0`.
    pub fn defaults() -> Self {
        let run = RunOptions::default();
        Self {
            name: String::new(),
            family: FamilySection {
                zoo: None,
                t: Vec::new(),
                i: Vec::new(),
                dim: 0,
                fixed_points: None,
                lambda: None,
                mu: None,
            },
            schedule: ScheduleParams {
                beta: aqin_core::SeqSpec::Constant(0.0),
                gamma: aqin_core::SeqSpec::Constant(0.0),
                beta_hat: aqin_core::SeqSpec::Constant(0.0),
                gamma_hat: aqin_core::SeqSpec::Constant(0.0),
                error_u: ErrorTermSpec::Zero,
                error_v: ErrorTermSpec::Zero,
            },
            x0: Vec::new(),
            horizon: run.horizon,
            stop_tol: run.stop_tol,
            inner_tol: run.inner.tol,
            inner_max: run.inner.max_iter,
            allow_noncontractive: run.inner.allow_noncontractive,
            validation_horizon: run.validation_horizon,
            hypotheses: run.hypotheses,
        }
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(seed) = o.seed {
            self.reseed(seed);
        }
        if let Some(h) = o.horizon {
            self.horizon = h;
        }
        self.allow_noncontractive |= o.allow_noncontractive;
    }

    /// Seeded error terms use `seed` for `u` and `seed + 1` for `v`.
    pub fn reseed(&mut self, seed: u64) {
        for (spec, s) in [
            (&mut self.schedule.error_u, seed),
            (&mut self.schedule.error_v, seed.wrapping_add(1)),
        ] {
            if let ErrorTermSpec::SeededRandom { seed, .. } = spec {
                *seed = s;
            }
        }
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            horizon: self.horizon,
            stop_tol: self.stop_tol,
            inner: InnerOptions {
                tol: self.inner_tol,
                max_iter: self.inner_max,
                allow_noncontractive: self.allow_noncontractive,
            },
            validation_horizon: self.validation_horizon,
            hypotheses: self.hypotheses,
        }
    }

    pub fn x0(&self) -> Result<Vector, Failure> {
        Vector::new(self.x0.clone()).map_err(|e| Failure::config(format!("x0: {e}")))
    }

    pub fn build_family(&self) -> Result<FamilyConfig, Failure> {
        build_family(&self.family)
    }
}

fn mapping(name: &str, dim: usize) -> Result<MappingSpec, Failure> {
    match zoo(name, dim).map_err(Failure::from_core)? {
        ZooEntry::Mapping(m) => Ok(m),
        ZooEntry::Family(_) => Err(Failure::config(format!(
            "`{name}` is a family, expected a single mapping"
        ))),
    }
}

pub fn build_family(section: &FamilySection) -> Result<FamilyConfig, Failure> {
    let dim = section.dim;
    let base = match (&section.zoo, section.t.is_empty() && section.i.is_empty()) {
        (Some(name), true) => match zoo(name, dim).map_err(Failure::from_core)? {
            ZooEntry::Family(f) => f,
            ZooEntry::Mapping(_) => {
                return Err(Failure::config(format!(
                    "`{name}` is a single mapping; list it under `t`/`i` instead"
                )))
            }
        },
        (None, false) => {
            let t = section
                .t
                .iter()
                .map(|n| mapping(n, dim))
                .collect::<Result<Vec<_>, _>>()?;
            let i = section
                .i
                .iter()
                .map(|n| mapping(n, dim))
                .collect::<Result<Vec<_>, _>>()?;
            let fixed = section.fixed_points.clone().unwrap_or_else(|| vec![Vector::zeros(dim)]);
            FamilyConfig::new(t, i, fixed).map_err(Failure::from_core)?
        }
        _ => return Err(Failure::config("family needs exactly one of `zoo` or `t`/`i`")),
    };
    if section.lambda.is_none() && section.mu.is_none() && (section.zoo.is_none() || section.fixed_points.is_none()) {
        return Ok(base);
    }
    FamilyConfig::with_rates(
        base.t_family().to_vec(),
        base.i_family().to_vec(),
        section.lambda.clone().unwrap_or_else(|| base.lambda().clone()),
        section.mu.clone().unwrap_or_else(|| base.mu().clone()),
        section.fixed_points.clone().unwrap_or_else(|| base.common_f().to_vec()),
    )
    .map_err(Failure::from_core)
}
