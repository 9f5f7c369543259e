use sha2::{Digest, Sha256};

use super::inner::{picard, preflight, InnerOptions, InnerSolveReport};
use super::{IterationTrace, StepRecord, Terminated};
use crate::diagnostics::distance_to_f;
use crate::error::{Error, Result};
use crate::mappings::{power_apply, FamilyConfig};
use crate::schedule::{
    generate_error_term, index_decompose, validate_conditions, Coefficients, ConditionReport, HypothesisSet,
    IndexDecomposition, ScheduleParams, DEFAULT_VALIDATION_HORIZON,
};
use crate::vectorspace::{convex_combine, distance, norm, Vector};

/// Slack on the per-step recurrence and `y`-bound checks.
pub const RECURRENCE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub horizon: usize,
    /// Stop once every residual and `dist(x_n, F)` fall below this.
    pub stop_tol: f64,
    pub inner: InnerOptions,
    pub validation_horizon: usize,
    pub hypotheses: HypothesisSet,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            horizon: 1_000,
            stop_tol: 1e-6,
            inner: InnerOptions::default(),
            validation_horizon: DEFAULT_VALIDATION_HORIZON,
            hypotheses: HypothesisSet::Recurrence,
        }
    }
}

/// Result of one implicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitStep {
    pub x: Vector,
    pub y: Vector,
    pub u: Vector,
    pub v: Vector,
    pub index: IndexDecomposition,
    pub coefficients: Coefficients,
    pub report: InnerSolveReport,
}

/// `y = alpha^ x + beta^ I^k x + gamma^ v`.
fn inner_point(
    family: &FamilyConfig,
    idx: &IndexDecomposition,
    c: &Coefficients,
    x: &Vector,
    v: &Vector,
) -> Result<Vector> {
    let ix = power_apply(family.i(idx.j), idx.k, x)?;
    convex_combine(&[c.alpha_hat, c.beta_hat, c.gamma_hat], &[x, &ix, v])
}

/// Solve `x = alpha x_prev + beta T_j^k(y(x)) + gamma u` for step `n`.
///
/// The inner loop is plain Picard when the declared uniform Lipschitz
/// constants certify `beta L1 (alpha^ + beta^ L2) < 1`; otherwise it is
/// refused unless `opts.allow_noncontractive` is set.
pub fn implicit_step(
    x_prev: &Vector,
    n: usize,
    family: &FamilyConfig,
    params: &ScheduleParams,
    opts: &InnerOptions,
) -> Result<ImplicitStep> {
    let idx = index_decompose(n, family.len())?;
    let c = params.coefficients(n)?;
    let dim = family.dim();
    let radius = family.domain_radius();
    let u = generate_error_term(&params.error_u, n, dim, radius)?;
    let v = generate_error_term(&params.error_v, n, dim, radius)?;
    let kind = family.norm_kind();

    let (x, report) = if c.beta == 0.0 {
        (
            convex_combine(&[c.alpha, c.gamma], &[x_prev, &u])?,
            InnerSolveReport::direct(),
        )
    } else {
        let bound = match (family.lipschitz_t(), family.lipschitz_i()) {
            (Some(l1), Some(l2)) => c.beta * l1 * (c.alpha_hat + c.beta_hat * l2),
            _ => f64::INFINITY,
        };
        let relaxation = preflight(n, bound, opts)?;
        let g = |x: &Vector| -> Result<Vector> {
            let y = inner_point(family, &idx, &c, x, &v)?;
            let ty = power_apply(family.t(idx.j), idx.k, &y)?;
            convex_combine(&[c.alpha, c.beta, c.gamma], &[x_prev, &ty, &u])
        };
        let (x, report) = picard(g, x_prev, relaxation, opts, kind)?;
        if !report.converged {
            return Err(Error::InnerStalled {
                n,
                iterations: report.iterations,
                residual: report.residual,
            });
        }
        (x, report)
    };
    let y = inner_point(family, &idx, &c, &x, &v)?;
    Ok(ImplicitStep {
        x,
        y,
        u,
        v,
        index: idx,
        coefficients: c,
        report,
    })
}

pub(crate) fn digest(parts: &[&dyn std::fmt::Debug]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(format!("{p:?}\n").as_bytes());
    }
    hex::encode(hasher.finalize())
}

fn family_fingerprint(family: &FamilyConfig) -> Vec<String> {
    family
        .t_family()
        .iter()
        .chain(family.i_family())
        .map(|m| format!("{}:{}:{:?}:{:?}", m.label(), m.dim(), m.lipschitz(), m.rate()))
        .collect()
}

/// Admit a run: structural validation plus the hypothesis checks.
pub(crate) fn admit(family: &FamilyConfig, params: &ScheduleParams, opts: &RunOptions) -> Result<ConditionReport> {
    params.validate()?;
    let report = validate_conditions(
        params,
        family.lambda(),
        family.mu(),
        opts.validation_horizon,
        opts.hypotheses,
    );
    if let Some(failed) = report.first_failure() {
        return Err(Error::ConditionFailed {
            label: failed.label.to_string(),
            message: failed.message.clone(),
        });
    }
    for c in report.indeterminate() {
        log::warn!("condition {} is indeterminate: {}", c.label, c.message);
    }
    if let Some(max) = params.max_horizon() {
        if opts.horizon > max {
            return Err(Error::InvalidArgument(format!(
                "horizon {} exceeds the explicit sequences' length {max}",
                opts.horizon
            )));
        }
    }
    Ok(report)
}

/// Run the implicit scheme with errors for `n = 1..=horizon`.
pub fn run_scheme(
    family: &FamilyConfig,
    params: &ScheduleParams,
    x0: &Vector,
    opts: &RunOptions,
) -> Result<IterationTrace> {
    let conditions = admit(family, params, opts)?;
    if x0.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            found: x0.dim(),
        });
    }
    let kind = family.norm_kind();
    let radius = family.domain_radius();
    if norm(x0, kind)? > radius {
        return Err(Error::InvalidArgument(format!(
            "x0 lies outside the domain ball of radius {radius}"
        )));
    }
    let margin = conditions.contraction_margin();
    let fixed = family.common_f();

    let mut steps: Vec<StepRecord> = Vec::with_capacity(opts.horizon.min(100_000));
    let mut terminated = Terminated::Horizon;
    let mut x_prev = x0.clone();
    for n in 1..=opts.horizon {
        let step = match implicit_step(&x_prev, n, family, params, &opts.inner) {
            Ok(s) => s,
            Err(Error::InnerStalled {
                n,
                iterations,
                residual,
            }) => {
                log::warn!("inner solver stalled at step {n} ({iterations} iterations, residual {residual})");
                terminated = Terminated::InnerFailure { n };
                break;
            }
            Err(e) => return Err(e),
        };
        let ImplicitStep {
            x,
            y,
            u,
            v,
            index,
            coefficients: c,
            report,
        } = step;

        let mut residuals_t = Vec::with_capacity(family.len());
        let mut residuals_i = Vec::with_capacity(family.len());
        for j in 1..=family.len() {
            residuals_t.push(distance(&x, &family.t(j).apply(&x)?, kind)?);
            residuals_i.push(distance(&x, &family.i(j).apply(&x)?, kind)?);
        }
        let dist_f = distance_to_f(&x, fixed, kind)?;

        let lm = family.lambda().value(index.k) * family.mu().value(index.k);
        let b = (lm * lm - 1.0) * c.beta / margin;
        let mut recurrence_ok = true;
        let mut y_bound_ok = true;
        let mut nearest: Option<(f64, f64)> = None;
        for p in fixed {
            let prev_d = distance(&x_prev, p, kind)?;
            let v_d = distance(&v, p, kind)?;
            let c_p = (c.gamma * distance(&u, p, kind)? + c.beta * lm * c.gamma_hat * v_d) / margin;
            let x_d = distance(&x, p, kind)?;
            recurrence_ok &= x_d <= (1.0 + b) * prev_d + c_p + RECURRENCE_SLACK;
            y_bound_ok &= distance(&y, p, kind)? <= lm * x_d + c.gamma_hat * v_d + RECURRENCE_SLACK;
            if nearest.is_none_or(|(d, _)| prev_d < d) {
                nearest = Some((prev_d, c_p));
            }
        }
        let record = StepRecord {
            n,
            x: x.clone(),
            y,
            k: index.k,
            j: index.j,
            inner: report,
            residuals_t,
            residuals_i,
            dist_f,
            recurrence_b: b,
            recurrence_c: nearest.map_or(0.0, |(_, c)| c),
            recurrence_ok,
            y_bound_ok,
        };
        if !recurrence_ok {
            log::warn!("step {n}: per-step recurrence violated");
        }
        let done = record.max_residual_t().max(record.max_residual_i()) < opts.stop_tol && dist_f < opts.stop_tol;
        steps.push(record);
        x_prev = x;
        if done {
            terminated = Terminated::Converged { tol: opts.stop_tol };
            break;
        }
    }
    let config_digest = digest(&[
        &family_fingerprint(family),
        family.lambda(),
        family.mu(),
        &fixed,
        params,
        x0,
        opts,
    ]);
    Ok(IterationTrace {
        x0: x0.clone(),
        steps,
        config_digest,
        terminated,
        conditions: Some(conditions),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{zoo, MappingSpec};
    use crate::schedule::{ErrorTermSpec, SeqSpec};

    fn constant_params(beta: f64, gamma: f64, beta_hat: f64, gamma_hat: f64) -> ScheduleParams {
        ScheduleParams {
            beta: SeqSpec::Constant(beta),
            gamma: SeqSpec::Constant(gamma),
            beta_hat: SeqSpec::Constant(beta_hat),
            gamma_hat: SeqSpec::Constant(gamma_hat),
            error_u: ErrorTermSpec::Zero,
            error_v: ErrorTermSpec::Zero,
        }
    }

    fn single(name: &str, d: usize) -> MappingSpec {
        zoo(name, d).unwrap().into_mapping().unwrap()
    }

    fn pair_family(t: &str, i: &str, d: usize) -> FamilyConfig {
        FamilyConfig::new(vec![single(t, d)], vec![single(i, d)], vec![Vector::zeros(d)]).unwrap()
    }

    #[test]
    fn identity_family_keeps_x_prev() {
        let fam = pair_family("identity", "identity", 3);
        let x_prev = Vector::new(vec![0.2, -0.1, 0.4]).unwrap();
        let step = implicit_step(
            &x_prev,
            1,
            &fam,
            &constant_params(0.5, 0.0, 0.5, 0.0),
            &InnerOptions::default(),
        )
        .unwrap();
        assert_eq!(step.x, x_prev);
        assert_eq!(step.report.iterations, 0);
    }

    #[test]
    fn scalar_linear_closed_form() {
        let fam = pair_family("linear_contraction(0.5)", "linear_contraction(0.5)", 1);
        let x_prev = Vector::new(vec![1.0]).unwrap();
        let step = implicit_step(
            &x_prev,
            1,
            &fam,
            &constant_params(0.5, 0.0, 0.5, 0.0),
            &InnerOptions::default(),
        )
        .unwrap();
        // oracle: x = alpha x_prev / (1 - beta a (alpha^ + beta^ a))
        let expected = 0.5 / (1.0 - 0.5 * 0.5 * (0.5 + 0.5 * 0.5));
        assert!((step.x.as_slice()[0] - expected).abs() < 1e-10);
        assert!((expected - 0.615_384_615_384_615_4).abs() < 1e-15);
        assert!(step.report.converged && step.report.residual <= 1e-12);
    }

    #[test]
    fn zero_beta_is_direct() {
        let fam = pair_family("paper_T", "paper_I", 4);
        let mut params = constant_params(0.0, 0.25, 0.5, 0.0);
        let u = Vector::new(vec![0.0, 0.4, 0.0, 0.0]).unwrap();
        params.error_u = ErrorTermSpec::Explicit(vec![u]);
        let x_prev = Vector::new(vec![0.8, 0.0, 0.0, 0.0]).unwrap();
        let step = implicit_step(&x_prev, 1, &fam, &params, &InnerOptions::default()).unwrap();
        assert_eq!(step.report.iterations, 0);
        assert_eq!(step.x.as_slice(), &[0.6000000000000001, 0.1, 0.0, 0.0]);
    }

    #[test]
    fn undeclared_lipschitz_needs_override() {
        let fam = pair_family("paper_T", "paper_I", 4);
        let params = constant_params(0.5, 0.0, 0.5, 0.0);
        let x_prev = Vector::new(vec![0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            implicit_step(&x_prev, 1, &fam, &params, &InnerOptions::default()),
            Err(Error::ContractionPrecondition { n: 1, .. })
        ));
        let lax = InnerOptions {
            allow_noncontractive: true,
            ..Default::default()
        };
        let step = implicit_step(&x_prev, 1, &fam, &params, &lax).unwrap();
        assert!(step.report.converged);
        assert_eq!(step.report.relaxation, 0.5);
    }

    #[test]
    fn identity_run_converges_at_once() {
        let fam = pair_family("identity", "identity", 2);
        let x0 = Vector::zeros(2);
        let trace = run_scheme(&fam, &constant_params(0.5, 0.0, 0.5, 0.0), &x0, &RunOptions::default()).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.terminated.as_str(), "converged");
    }

    #[test]
    fn failing_condition_refuses_the_run() {
        let fam = pair_family("identity", "identity", 2);
        let err = run_scheme(
            &fam,
            &constant_params(0.5, 0.5, 0.5, 0.0),
            &Vector::zeros(2),
            &RunOptions::default(),
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::ConditionFailed { ref label, .. } if label == "(v)"),
            "{err}"
        );
    }

    #[test]
    fn stalled_inner_solve_ends_the_trace() {
        let fam = pair_family("paper_T", "paper_I", 4);
        let params = constant_params(0.5, 0.0, 0.5, 0.0);
        let opts = RunOptions {
            horizon: 10,
            inner: InnerOptions {
                tol: 1e-12,
                max_iter: 1,
                allow_noncontractive: true,
            },
            ..Default::default()
        };
        let x0 = Vector::new(vec![0.9, 0.0, 0.0, 0.0]).unwrap();
        let trace = run_scheme(&fam, &params, &x0, &opts).unwrap();
        assert_eq!(trace.terminated, Terminated::InnerFailure { n: 1 });
        assert!(trace.steps.is_empty());
    }
}
