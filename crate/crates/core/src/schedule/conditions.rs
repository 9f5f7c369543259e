//! Hypothesis checks on a schedule.
//!
//! Labels follow the five-condition numbering:
//!
//! * (i)   six sequences in `[0, 1]` with `alpha + beta + gamma = alpha^ + beta^ + gamma^ = 1`
//! * (ii)  `sum (lambda_n mu_n - 1) beta_n < inf`
//! * (iii) `B* = sup beta_n < 1 / (Lambda^2 M^2)`; with the residual hypothesis set also `0 < B_* = inf beta_n`
//! * (iv)  `0 < inf beta^_n <= sup beta^_n < 1` (residual hypothesis set only)
//! * (v)   `sum gamma_n < inf` and `sum gamma^_n < inf`
//!
//! Summability is decided from the symbolic form of each sequence. A
//! finite explicit list cannot certify its tail, so it yields
//! `Indeterminate` wherever the tail matters.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::sequence::SeqDecay;
use super::{Extremum, ScheduleParams, SeqSpec};
use crate::mappings::{AsymptoticRate, Decay};

pub const DEFAULT_VALIDATION_HORIZON: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Indeterminate => "INDETERMINATE",
        })
    }
}

/// Hypothesis set a run must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisSet {
    /// (i), (ii), (iii), (v): enough for the per-step recurrence and the
    /// strong-convergence criterion.
    #[default]
    Recurrence,
    /// All five, with `B_* > 0` added to (iii): the residual-decay hypotheses.
    Residual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub label: &'static str,
    pub verdict: Verdict,
    /// Whether the chosen hypothesis set requires this condition.
    pub required: bool,
    pub message: String,
}

impl fmt::Display for ConditionCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let note = if self.required { "" } else { " (not required)" };
        write!(f, "{:<6} {}{}: {}", self.label, self.verdict, note, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub hypotheses: HypothesisSet,
    /// `B* = sup beta_n`.
    pub b_star_sup: f64,
    /// `B_* = inf beta_n`.
    pub b_star_inf: f64,
    pub b_hat_sup: f64,
    pub b_hat_inf: f64,
    /// `Lambda = sup lambda_n`.
    pub lambda_sup: f64,
    /// `M = sup mu_n`.
    pub mu_sup: f64,
    pub cond_i: ConditionCheck,
    pub cond_ii: ConditionCheck,
    pub cond_iii: ConditionCheck,
    pub cond_iv: ConditionCheck,
    pub cond_v: ConditionCheck,
}

impl ConditionReport {
    pub fn checks(&self) -> [&ConditionCheck; 5] {
        [&self.cond_i, &self.cond_ii, &self.cond_iii, &self.cond_iv, &self.cond_v]
    }

    /// First required condition that failed.
    pub fn first_failure(&self) -> Option<&ConditionCheck> {
        self.checks()
            .into_iter()
            .find(|c| c.required && c.verdict == Verdict::Fail)
    }

    pub fn indeterminate(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks()
            .into_iter()
            .filter(|c| c.required && c.verdict == Verdict::Indeterminate)
    }

    /// `1 - B* Lambda^2 M^2`, the denominator of `b_n` and `c_n`.
    pub fn contraction_margin(&self) -> f64 {
        1.0 - self.b_star_sup * (self.lambda_sup * self.mu_sup).powi(2)
    }
}

fn check(label: &'static str, required: bool, verdict: Verdict, message: impl Into<String>) -> ConditionCheck {
    ConditionCheck {
        label,
        verdict,
        required,
        message: message.into(),
    }
}

fn cond_i(params: &ScheduleParams, horizon: usize) -> ConditionCheck {
    for (role, seq) in [
        ("beta", &params.beta),
        ("gamma", &params.gamma),
        ("beta_hat", &params.beta_hat),
        ("gamma_hat", &params.gamma_hat),
    ] {
        if let Err(e) = seq.validate() {
            return check("(i)", true, Verdict::Fail, format!("{role}: {e}"));
        }
    }
    let seqs = [&params.beta, &params.gamma, &params.beta_hat, &params.gamma_hat];
    let explicit_len = seqs.iter().filter_map(|s| s.explicit_len()).min();
    // Constant and power forms are nonincreasing, so with no explicit list
    // alpha_n is smallest at n = 1 and one index decides (i) exactly.
    let scan = match explicit_len {
        None => 1,
        Some(len) => horizon.min(len),
    };
    for n in 1..=scan {
        let c = match params.coefficients(n) {
            Ok(c) => c,
            Err(e) => return check("(i)", true, Verdict::Fail, e.to_string()),
        };
        if c.alpha < 0.0 {
            return check(
                "(i)",
                true,
                Verdict::Fail,
                format!("alpha_{n} = 1 - beta_{n} - gamma_{n} = {} < 0", c.alpha),
            );
        }
        if c.alpha_hat < 0.0 {
            return check(
                "(i)",
                true,
                Verdict::Fail,
                format!("alpha^_{n} = 1 - beta^_{n} - gamma^_{n} = {} < 0", c.alpha_hat),
            );
        }
    }
    match explicit_len {
        Some(len) if scan < len => check(
            "(i)",
            true,
            Verdict::Indeterminate,
            format!("derived alpha_n, alpha^_n in [0, 1] for n <= {scan} of {len}"),
        ),
        _ => check("(i)", true, Verdict::Pass, "derived alpha_n, alpha^_n lie in [0, 1]"),
    }
}

fn cond_ii(params: &ScheduleParams, lambda: &AsymptoticRate, mu: &AsymptoticRate) -> ConditionCheck {
    let rate = lambda.decay().slowest(mu.decay());
    let (verdict, message) = match (rate, params.beta.decay()) {
        (Decay::Zero, _) => (Verdict::Pass, "lambda_n mu_n = 1 identically".to_string()),
        (_, SeqDecay::Zero) => (Verdict::Pass, "beta_n = 0 identically".to_string()),
        (Decay::EventuallyZero, _) => (
            Verdict::Pass,
            "lambda_n mu_n - 1 vanishes beyond a finite index".to_string(),
        ),
        (Decay::Power(a), SeqDecay::Power(b)) => {
            if a + b > 1.0 {
                (Verdict::Pass, format!("terms ~ n^-{}, exponent > 1", a + b))
            } else {
                (Verdict::Fail, format!("terms ~ n^-{}, exponent <= 1 diverges", a + b))
            }
        }
        (Decay::Power(a), SeqDecay::Unknown) => (
            Verdict::Indeterminate,
            format!("lambda_n mu_n - 1 ~ n^-{a} but the beta tail is unknown"),
        ),
    };
    check("(ii)", true, verdict, message)
}

fn cond_iii(hypotheses: HypothesisSet, sup: Extremum, inf: Extremum, lambda_sup: f64, mu_sup: f64) -> ConditionCheck {
    let bound = 1.0 / (lambda_sup * mu_sup).powi(2);
    if sup.value >= bound {
        return check(
            "(iii)",
            true,
            Verdict::Fail,
            format!("B* = {} >= 1/(Lambda^2 M^2) = {bound}", sup.value),
        );
    }
    let residual = hypotheses == HypothesisSet::Residual;
    if residual && inf.value <= 0.0 {
        return check(
            "(iii)",
            true,
            Verdict::Fail,
            format!("B_* = inf beta_n = {} is not > 0", inf.value),
        );
    }
    let complete = sup.complete && (!residual || inf.complete);
    let mut message = format!("B* = {} < 1/(Lambda^2 M^2) = {bound}", sup.value);
    if residual {
        message = format!("0 < B_* = {}, {message}", inf.value);
    }
    if complete {
        check("(iii)", true, Verdict::Pass, message)
    } else {
        check(
            "(iii)",
            true,
            Verdict::Indeterminate,
            format!("{message} over a partial scan"),
        )
    }
}

fn cond_iv(hypotheses: HypothesisSet, sup: Extremum, inf: Extremum) -> ConditionCheck {
    let required = hypotheses == HypothesisSet::Residual;
    if inf.value <= 0.0 {
        return check(
            "(iv)",
            required,
            Verdict::Fail,
            format!("inf beta^_n = {} is not > 0", inf.value),
        );
    }
    if sup.value >= 1.0 {
        return check(
            "(iv)",
            required,
            Verdict::Fail,
            format!("sup beta^_n = {} is not < 1", sup.value),
        );
    }
    let message = format!("0 < {} <= {} < 1", inf.value, sup.value);
    if sup.complete && inf.complete {
        check("(iv)", required, Verdict::Pass, message)
    } else {
        check(
            "(iv)",
            required,
            Verdict::Indeterminate,
            format!("{message} over a partial scan"),
        )
    }
}

fn summable(seq: &SeqSpec) -> (Verdict, String) {
    match seq.decay() {
        SeqDecay::Zero => (Verdict::Pass, "identically 0".into()),
        SeqDecay::Power(q) if q > 1.0 => (Verdict::Pass, format!("~ n^-{q}, exponent > 1")),
        SeqDecay::Power(q) => (Verdict::Fail, format!("~ n^-{q}, exponent <= 1 diverges")),
        SeqDecay::Unknown => (Verdict::Indeterminate, "explicit list, tail unknown".into()),
    }
}

fn cond_v(params: &ScheduleParams) -> ConditionCheck {
    let (vg, mg) = summable(&params.gamma);
    let (vh, mh) = summable(&params.gamma_hat);
    let verdict = if vg == Verdict::Fail || vh == Verdict::Fail {
        Verdict::Fail
    } else if vg == Verdict::Indeterminate || vh == Verdict::Indeterminate {
        Verdict::Indeterminate
    } else {
        Verdict::Pass
    };
    check("(v)", true, verdict, format!("sum gamma_n: {mg}; sum gamma^_n: {mh}"))
}

/// Classify every hypothesis for `params` under the common rates.
///
/// `horizon` bounds the scan of explicit lists. A partial scan can report
/// a definite `Fail` but never a definite `Pass`, so extending the horizon
/// only ever resolves `Indeterminate` outcomes.
pub fn validate_conditions(
    params: &ScheduleParams,
    lambda: &AsymptoticRate,
    mu: &AsymptoticRate,
    horizon: usize,
    hypotheses: HypothesisSet,
) -> ConditionReport {
    let horizon = horizon.max(1);
    let lambda_sup = lambda.sup();
    let mu_sup = mu.sup();
    let b_sup = params.beta.sup(horizon);
    let b_inf = params.beta.inf(horizon);
    let bh_sup = params.beta_hat.sup(horizon);
    let bh_inf = params.beta_hat.inf(horizon);
    ConditionReport {
        hypotheses,
        b_star_sup: b_sup.value,
        b_star_inf: b_inf.value,
        b_hat_sup: bh_sup.value,
        b_hat_inf: bh_inf.value,
        lambda_sup,
        mu_sup,
        cond_i: cond_i(params, horizon),
        cond_ii: cond_ii(params, lambda, mu),
        cond_iii: cond_iii(hypotheses, b_sup, b_inf, lambda_sup, mu_sup),
        cond_iv: cond_iv(hypotheses, bh_sup, bh_inf),
        cond_v: cond_v(params),
    }
}
