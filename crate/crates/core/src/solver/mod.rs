//! The implicit step, the scheme runner, and the Xu-Ori and Sun baselines.

mod baseline;
mod inner;
mod scheme;

pub use baseline::{run_sun, run_xu_ori, OperatorFamily};
pub use inner::{InnerOptions, InnerSolveReport, OVERRIDE_RELAXATION};
pub use scheme::{implicit_step, run_scheme, ImplicitStep, RunOptions, RECURRENCE_SLACK};

use crate::schedule::ConditionReport;
use crate::vectorspace::Vector;

/// Everything recorded about one outer step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub x: Vector,
    pub y: Vector,
    pub k: usize,
    pub j: usize,
    pub inner: InnerSolveReport,
    /// `||x_n - T_j x_n||` for `j = 1..=N`.
    pub residuals_t: Vec<f64>,
    /// `||x_n - I_j x_n||` for `j = 1..=N` (empty for the baselines).
    pub residuals_i: Vec<f64>,
    pub dist_f: f64,
    pub recurrence_b: f64,
    /// `c_n` evaluated at the declared fixed point nearest to `x_{n-1}`.
    pub recurrence_c: f64,
    /// `||x_n - p|| <= (1 + b_n) ||x_{n-1} - p|| + c_n(p) + slack` for every declared `p`.
    pub recurrence_ok: bool,
    /// `||y_n - p|| <= lambda_k mu_k ||x_n - p|| + gamma^_n ||v_n - p|| + slack` for every `p`.
    pub y_bound_ok: bool,
}

impl StepRecord {
    pub fn max_residual_t(&self) -> f64 {
        self.residuals_t.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_residual_i(&self) -> f64 {
        self.residuals_i.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Terminated {
    Horizon,
    Converged {
        tol: f64,
    },
    /// The inner solver stalled at step `n`; steps before `n` are kept.
    InnerFailure {
        n: usize,
    },
}

impl Terminated {
    pub fn as_str(&self) -> &'static str {
        match self {
            Terminated::Horizon => "horizon",
            Terminated::Converged { .. } => "converged",
            Terminated::InnerFailure { .. } => "inner_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub x0: Vector,
    /// Consecutive steps from `n = 1`.
    pub steps: Vec<StepRecord>,
    pub config_digest: String,
    pub terminated: Terminated,
    /// Hypothesis report the run was admitted under (absent for baselines).
    pub conditions: Option<ConditionReport>,
}

impl IterationTrace {
    pub fn last(&self) -> Option<&StepRecord> {
        self.steps.last()
    }

    /// `x_{n}` with `x_0` at index 0.
    pub fn iterate(&self, n: usize) -> Option<&Vector> {
        if n == 0 {
            Some(&self.x0)
        } else {
            self.steps.get(n - 1).map(|s| &s.x)
        }
    }

    pub fn all_recurrences_hold(&self) -> bool {
        self.steps.iter().all(|s| s.recurrence_ok && s.y_bound_ok)
    }
}
