//! Trace analysis: the Tan-Xu recurrence oracle, residual profiles,
//! distance-to-`F` monitoring and cross-iterate gaps.

use crate::error::{Error, Result};
use crate::mappings::FamilyConfig;
use crate::solver::{IterationTrace, RECURRENCE_SLACK};
use crate::vectorspace::{distance, NormKind, Vector};

/// Absolute slack in the witness invariant.
pub const WITNESS_SLACK: f64 = 1e-12;
/// Agreement required between stored and recomputed residuals.
pub const INTEGRITY_TOL: f64 = 1e-12;
pub const DEFAULT_WINDOW: usize = 50;
pub const DEFAULT_CAUCHY_TOL: f64 = 1e-8;

/// `min_{p in F} ||x - p||`.
pub fn distance_to_f(x: &Vector, fixed: &[Vector], kind: NormKind) -> Result<f64> {
    if fixed.is_empty() {
        return Err(Error::EmptyFixedPointSet);
    }
    fixed
        .iter()
        .try_fold(f64::INFINITY, |best, p| Ok(best.min(distance(x, p, kind)?)))
}

/// A nonnegative sequence with `a_{n+1} <= (1 + b_n) a_n + c_n`.
///
/// `a[0]` is the first term; `b[i]` and `c[i]` drive the step `a[i] -> a[i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceWitness {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub partial_sum_b: f64,
    pub partial_sum_c: f64,
    /// `exp(partial_sum_b)`, over [`horizon`](Self::horizon) terms.
    pub w_estimate: f64,
    pub horizon: usize,
}

impl RecurrenceWitness {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        Self::with_slack(a, b, c, WITNESS_SLACK)
    }

    pub fn with_slack(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, slack: f64) -> Result<Self> {
        if a.is_empty() || b.len() + 1 != a.len() || c.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "witness needs len(a) = len(b) + 1 = len(c) + 1, got {}, {}, {}",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        for (i, &v) in a.iter().enumerate() {
            if !ok(v) {
                return Err(Error::InvalidRecurrence { index: i });
            }
        }
        for i in 0..b.len() {
            if !ok(b[i]) || !ok(c[i]) || a[i + 1] > (1.0 + b[i]) * a[i] + c[i] + slack {
                return Err(Error::InvalidRecurrence { index: i });
            }
        }
        let partial_sum_b: f64 = b.iter().sum();
        let partial_sum_c: f64 = c.iter().sum();
        Ok(Self {
            horizon: b.len(),
            w_estimate: partial_sum_b.exp(),
            a,
            b,
            c,
            partial_sum_b,
            partial_sum_c,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Undecided,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceVerdict {
    /// Last term of `a`, reported only on a converged verdict.
    pub limit_estimate: Option<f64>,
    /// `max |a_m - a_n|` over the last `window` terms.
    pub cauchy_defect: f64,
    pub verdict: Verdict,
}

/// Window-Cauchy reading of the Tan-Xu recurrence.
///
/// Converged iff the last `window` terms of `a` agree within `tol` and the
/// sums of `b` and `c` over the last `window` steps are both below `tol`.
pub fn tan_xu_oracle(witness: &RecurrenceWitness, window: usize, tol: f64) -> Result<ConvergenceVerdict> {
    if window == 0 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("window must be >= 1 and tol > 0".into()));
    }
    let w = &witness.a;
    let tail = &w[w.len().saturating_sub(window)..];
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let cauchy_defect = hi - lo;
    let full = w.len() > window;
    let steps = witness.b.len();
    let from = steps.saturating_sub(window);
    let inc_b: f64 = witness.b[from..].iter().sum();
    let inc_c: f64 = witness.c[from..].iter().sum();
    let converged = full && cauchy_defect <= tol && inc_b < tol && inc_c < tol;
    Ok(ConvergenceVerdict {
        limit_estimate: converged.then(|| w[w.len() - 1]),
        cauchy_defect,
        verdict: if converged {
            Verdict::Converged
        } else {
            Verdict::Undecided
        },
    })
}

/// The distance recurrence `a_n = d(x_n, F)` with the stored `b_n`, `c_n`.
///
/// Negative `b_n` (rates below one) are clamped to zero, which keeps the
/// inequality valid. The witness allows the per-step slack of the scheme.
pub fn witness_from_trace(trace: &IterationTrace, fixed: &[Vector], kind: NormKind) -> Result<RecurrenceWitness> {
    let mut a = Vec::with_capacity(trace.steps.len() + 1);
    a.push(distance_to_f(&trace.x0, fixed, kind)?);
    a.extend(trace.steps.iter().map(|s| s.dist_f));
    let b = trace.steps.iter().map(|s| s.recurrence_b.max(0.0)).collect();
    let c = trace.steps.iter().map(|s| s.recurrence_c).collect();
    RecurrenceWitness::with_slack(a, b, c, RECURRENCE_SLACK)
}

/// Steps `n` where `d(x_n, F) > (1 + b_n) d(x_{n-1}, F) + c_n + slack`.
pub fn distance_bound_violations(trace: &IterationTrace, fixed: &[Vector], kind: NormKind) -> Result<Vec<usize>> {
    let mut prev = distance_to_f(&trace.x0, fixed, kind)?;
    let mut bad = Vec::new();
    for s in &trace.steps {
        if s.dist_f > (1.0 + s.recurrence_b) * prev + s.recurrence_c + RECURRENCE_SLACK {
            bad.push(s.n);
        }
        prev = s.dist_f;
    }
    Ok(bad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub n: usize,
    pub res_t_max: f64,
    pub res_i_max: f64,
    pub dist_f: f64,
}

/// Recompute `max_j ||x_n - T_j x_n||`, `max_j ||x_n - I_j x_n||` and
/// `d(x_n, F)` from the stored iterates and cross-check the records.
pub fn residual_profile(trace: &IterationTrace, family: &FamilyConfig) -> Result<Vec<ResidualRow>> {
    if trace.steps.is_empty() {
        return Err(Error::InvalidArgument("residual profile of an empty trace".into()));
    }
    let kind = family.norm_kind();
    let mut rows = Vec::with_capacity(trace.steps.len());
    for s in &trace.steps {
        let mut res_t_max: f64 = 0.0;
        let mut res_i_max: f64 = 0.0;
        for j in 1..=family.len() {
            res_t_max = res_t_max.max(distance(&s.x, &family.t(j).apply(&s.x)?, kind)?);
            res_i_max = res_i_max.max(distance(&s.x, &family.i(j).apply(&s.x)?, kind)?);
        }
        let row = ResidualRow {
            n: s.n,
            res_t_max,
            res_i_max,
            dist_f: distance_to_f(&s.x, family.common_f(), kind)?,
        };
        for (what, stored, fresh) in [
            ("res_T_max", s.max_residual_t(), row.res_t_max),
            ("res_I_max", s.max_residual_i(), row.res_i_max),
            ("dist_F", s.dist_f, row.dist_f),
        ] {
            let diff = (stored - fresh).abs();
            if diff.is_nan() || diff > INTEGRITY_TOL {
                return Err(Error::TraceIntegrity {
                    n: s.n,
                    what: what.into(),
                    diff,
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub n: usize,
    /// `||x_n - x_{n+j}||` for `j = 1..=N`.
    pub gaps: Vec<f64>,
}

/// Gap table over the recorded steps; empty when the trace has at most `N` steps.
pub fn cross_iterate_gaps(trace: &IterationTrace, family_size: usize, kind: NormKind) -> Result<Vec<GapRow>> {
    let s = &trace.steps;
    if family_size == 0 || s.len() <= family_size {
        return Ok(Vec::new());
    }
    (0..s.len() - family_size)
        .map(|i| {
            let gaps = (1..=family_size)
                .map(|j| distance(&s[i].x, &s[i + j].x, kind))
                .collect::<Result<Vec<_>>>()?;
            Ok(GapRow { n: s[i].n, gaps })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{zoo, MappingSpec};
    use crate::schedule::{ErrorTermSpec, ScheduleParams, SeqSpec};
    use crate::solver::{run_scheme, RunOptions};

    fn v(xs: &[f64]) -> Vector {
        Vector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn distance_to_f_examples() {
        let x = v(&[0.3, 0.4]);
        assert_eq!(distance_to_f(&x, std::slice::from_ref(&x), NormKind::L2).unwrap(), 0.0);
        assert!((distance_to_f(&x, &[Vector::zeros(2)], NormKind::L2).unwrap() - 0.5).abs() < 1e-15);
        let f = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert_eq!(distance_to_f(&Vector::zeros(2), &f, NormKind::L2).unwrap(), 1.0);
        assert!(matches!(
            distance_to_f(&x, &[], NormKind::L2),
            Err(Error::EmptyFixedPointSet)
        ));
    }

    fn geometric_instance(len: usize) -> RecurrenceWitness {
        let mut a = vec![1.0];
        let mut b = Vec::new();
        let mut c = Vec::new();
        for n in 1..len {
            let t = 0.5f64.powi(n as i32);
            let next = (1.0 + t) * a[n - 1] + t;
            a.push(next);
            b.push(t);
            c.push(t);
        }
        RecurrenceWitness::new(a, b, c).unwrap()
    }

    #[test]
    fn geometric_instance_converges_to_brute_force_limit() {
        // oracle: iterate the equality recursion far past the window
        let mut limit = 1.0f64;
        for n in 1..200 {
            let t = 0.5f64.powi(n);
            limit = (1.0 + t) * limit + t;
        }
        let w = geometric_instance(200);
        let verdict = tan_xu_oracle(&w, DEFAULT_WINDOW, DEFAULT_CAUCHY_TOL).unwrap();
        assert_eq!(verdict.verdict, Verdict::Converged);
        assert!((verdict.limit_estimate.unwrap() - limit).abs() < 1e-12);
        assert!(verdict.cauchy_defect <= DEFAULT_CAUCHY_TOL);
        assert!((w.w_estimate - w.partial_sum_b.exp()).abs() < 1e-15);
    }

    #[test]
    fn constant_instance_has_zero_defect() {
        let w = RecurrenceWitness::new(vec![0.7; 60], vec![0.0; 59], vec![0.0; 59]).unwrap();
        let verdict = tan_xu_oracle(&w, DEFAULT_WINDOW, DEFAULT_CAUCHY_TOL).unwrap();
        assert_eq!(verdict.verdict, Verdict::Converged);
        assert_eq!(verdict.limit_estimate, Some(0.7));
        assert_eq!(verdict.cauchy_defect, 0.0);
    }

    #[test]
    fn harmonic_instance_is_undecided() {
        let len = 10_000;
        let a: Vec<f64> = (1..=len)
            .scan(0.0, |h, n| {
                *h += 1.0 / n as f64;
                Some(*h)
            })
            .collect();
        let c: Vec<f64> = (1..len).map(|n| 1.0 / (n + 1) as f64).collect();
        let w = RecurrenceWitness::new(a, vec![0.0; len - 1], c).unwrap();
        let verdict = tan_xu_oracle(&w, DEFAULT_WINDOW, DEFAULT_CAUCHY_TOL).unwrap();
        assert_eq!(verdict.verdict, Verdict::Undecided);
        assert_eq!(verdict.limit_estimate, None);
    }

    #[test]
    fn short_witness_is_undecided() {
        let w = RecurrenceWitness::new(vec![1.0; 10], vec![0.0; 9], vec![0.0; 9]).unwrap();
        assert_eq!(tan_xu_oracle(&w, 50, 1e-8).unwrap().verdict, Verdict::Undecided);
    }

    #[test]
    fn violated_recurrence_is_rejected() {
        let err = RecurrenceWitness::new(vec![1.0, 1.0, 2.0], vec![0.0, 0.5], vec![0.0, 0.1]).unwrap_err();
        assert!(matches!(err, Error::InvalidRecurrence { index: 1 }));
        assert!(err.to_string().contains("not a valid recurrence instance"));
    }

    fn single(name: &str, d: usize) -> MappingSpec {
        zoo(name, d).unwrap().into_mapping().unwrap()
    }

    const BETA: f64 = 0.6;

    /// `T = I = a x` on the line with `beta = 0.6`, `beta^ = 0.5`, no errors.
    fn scalar_run(a: f64, horizon: usize) -> (FamilyConfig, IterationTrace) {
        let name = format!("linear_contraction({a})");
        let fam = FamilyConfig::new(vec![single(&name, 1)], vec![single(&name, 1)], vec![Vector::zeros(1)]).unwrap();
        let params = ScheduleParams {
            beta: SeqSpec::Constant(BETA),
            gamma: SeqSpec::Constant(0.0),
            beta_hat: SeqSpec::Constant(0.5),
            gamma_hat: SeqSpec::Constant(0.0),
            error_u: ErrorTermSpec::Zero,
            error_v: ErrorTermSpec::Zero,
        };
        let opts = RunOptions {
            horizon,
            stop_tol: 0.0,
            ..Default::default()
        };
        let trace = run_scheme(&fam, &params, &v(&[1.0]), &opts).unwrap();
        (fam, trace)
    }

    #[test]
    fn residual_profile_matches_and_detects_tampering() {
        let (fam, mut trace) = scalar_run(0.5, 30);
        let rows = residual_profile(&trace, &fam).unwrap();
        assert_eq!(rows.len(), 30);
        assert_eq!(rows[4].n, 5);
        trace.steps[7].residuals_t[0] += 1e-6;
        assert!(matches!(
            residual_profile(&trace, &fam),
            Err(Error::TraceIntegrity { n: 8, .. })
        ));
    }

    #[test]
    fn one_step_trace_gives_one_row() {
        let (fam, trace) = scalar_run(0.5, 1);
        assert_eq!(residual_profile(&trace, &fam).unwrap().len(), 1);
    }

    #[test]
    fn identity_family_has_zero_residuals() {
        let fam = FamilyConfig::new(
            vec![single("identity", 3)],
            vec![single("identity", 3)],
            vec![Vector::zeros(3)],
        )
        .unwrap();
        let params = ScheduleParams {
            beta: SeqSpec::Constant(0.5),
            gamma: SeqSpec::Constant(0.0),
            beta_hat: SeqSpec::Constant(0.5),
            gamma_hat: SeqSpec::Constant(0.0),
            error_u: ErrorTermSpec::Zero,
            error_v: ErrorTermSpec::Zero,
        };
        let opts = RunOptions {
            horizon: 5,
            stop_tol: 0.0,
            ..Default::default()
        };
        let trace = run_scheme(&fam, &params, &v(&[0.1, 0.2, 0.3]), &opts).unwrap();
        for row in residual_profile(&trace, &fam).unwrap() {
            assert_eq!((row.res_t_max, row.res_i_max), (0.0, 0.0));
        }
        for row in cross_iterate_gaps(&trace, 1, NormKind::L2).unwrap() {
            assert_eq!(row.gaps, vec![0.0]);
        }
    }

    #[test]
    fn scalar_gaps_decay_geometrically() {
        let (_, trace) = scalar_run(0.5, 40);
        // closed form with N = 1, k(n) = n: x_n = r_n x_{n-1},
        // r_n = (1 - beta) / (1 - beta a^n (alpha^ + beta^ a^n))
        let mut x = vec![1.0f64];
        for n in 1..=40 {
            let an = 0.5f64.powi(n);
            x.push(x[n as usize - 1] * (1.0 - BETA) / (1.0 - BETA * an * (0.5 + 0.5 * an)));
        }
        let rows = cross_iterate_gaps(&trace, 1, NormKind::L2).unwrap();
        assert_eq!(rows.len(), 39);
        for row in &rows {
            let expected = x[row.n] - x[row.n + 1];
            assert!((row.gaps[0] - expected).abs() <= 1e-10, "n = {}", row.n);
        }
        // ratios only where gaps sit well above the inner tolerance
        for pair in rows[5..15].windows(2) {
            let ratio = pair[1].gaps[0] / pair[0].gaps[0];
            assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn gap_table_edges() {
        let (_, trace) = scalar_run(0.5, 4);
        assert_eq!(cross_iterate_gaps(&trace, 3, NormKind::L2).unwrap().len(), 1);
        assert!(cross_iterate_gaps(&trace, 4, NormKind::L2).unwrap().is_empty());
    }

    #[test]
    fn trace_witness_and_distance_bound() {
        let (fam, trace) = scalar_run(0.5, 120);
        assert!(distance_bound_violations(&trace, fam.common_f(), NormKind::L2)
            .unwrap()
            .is_empty());
        let w = witness_from_trace(&trace, fam.common_f(), NormKind::L2).unwrap();
        assert_eq!(w.horizon, 120);
        let verdict = tan_xu_oracle(&w, DEFAULT_WINDOW, DEFAULT_CAUCHY_TOL).unwrap();
        assert_eq!(verdict.verdict, Verdict::Converged);
    }
}
