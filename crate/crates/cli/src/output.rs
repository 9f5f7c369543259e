//! Trace CSV and run summary.

use std::io::{self, Write};

use aqin_core::diagnostics::{
    distance_bound_violations, tan_xu_oracle, witness_from_trace, DEFAULT_CAUCHY_TOL, DEFAULT_WINDOW,
};
use aqin_core::{FamilyConfig, IterationTrace, Terminated};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;

pub const CSV_HEADER: &str = "n,k,j,inner_iters,inner_residual,res_T_max,res_I_max,dist_F,b_n,c_n,recurrence_ok";

/// One row per step; reals in shortest round-trip scientific notation.
pub fn write_csv(trace: &IterationTrace, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in &trace.steps {
        writeln!(
            w,
            "{},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            s.n,
            s.k,
            s.j,
            s.inner.iterations,
            s.inner.residual,
            s.max_residual_t(),
            s.max_residual_i(),
            s.dist_f,
            s.recurrence_b,
            s.recurrence_c,
            s.recurrence_ok
        )?;
    }
    Ok(())
}

pub fn csv_string(trace: &IterationTrace) -> String {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn summary(cfg: &ExperimentConfig, family: &FamilyConfig, trace: &IterationTrace) -> Value {
    let kind = family.norm_kind();
    let partial_b: f64 = trace.steps.iter().map(|s| s.recurrence_b).sum();
    let partial_c: f64 = trace.steps.iter().map(|s| s.recurrence_c).sum();
    let tan_xu = witness_from_trace(trace, family.common_f(), kind)
        .and_then(|w| tan_xu_oracle(&w, DEFAULT_WINDOW, DEFAULT_CAUCHY_TOL))
        .map(|v| {
            json!({
                "verdict": v.verdict.as_str(),
                "cauchy_defect": v.cauchy_defect,
                "limit_estimate": v.limit_estimate,
                "window": DEFAULT_WINDOW,
                "tol": DEFAULT_CAUCHY_TOL,
            })
        })
        .unwrap_or_else(|e| json!({ "error": e.to_string() }));
    let final_row = trace.last().map(|s| {
        json!({
            "n": s.n,
            "res_T_max": s.max_residual_t(),
            "res_I_max": s.max_residual_i(),
            "dist_F": s.dist_f,
        })
    });
    let conditions: Vec<Value> = trace
        .conditions
        .iter()
        .flat_map(|r| r.checks())
        .map(|c| {
            json!({
                "label": c.label,
                "verdict": c.verdict.to_string(),
                "required": c.required,
                "message": c.message,
            })
        })
        .collect();
    json!({
        "scenario": cfg.name,
        "config_digest": trace.config_digest,
        "terminated": trace.terminated.as_str(),
        "terminated_at": match trace.terminated {
            Terminated::InnerFailure { n } => Some(n),
            _ => trace.last().map(|s| s.n),
        },
        "stop_tol": cfg.stop_tol,
        "steps": trace.steps.len(),
        "final": final_row,
        "first_dist_F_below_stop_tol": trace.steps.iter().find(|s| s.dist_f < cfg.stop_tol).map(|s| s.n),
        "W_estimate": partial_b.exp(),
        "W_horizon": trace.steps.len(),
        "partial_sum_b": partial_b,
        "partial_sum_c": partial_c,
        "recurrence_violations": trace.steps.iter().filter(|s| !s.recurrence_ok).map(|s| s.n).collect::<Vec<_>>(),
        "y_bound_violations": trace.steps.iter().filter(|s| !s.y_bound_ok).map(|s| s.n).collect::<Vec<_>>(),
        "distance_bound_violations": distance_bound_violations(trace, family.common_f(), kind).ok(),
        "max_inner_iterations": trace.steps.iter().map(|s| s.inner.iterations).max(),
        "tan_xu": tan_xu,
        "conditions": conditions,
    })
}
