//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use aqin_cli::config::ExperimentConfig;
use aqin_cli::scenarios::{lookup, SCENARIOS};
use aqin_core::diagnostics::{tan_xu_oracle, RecurrenceWitness, Verdict as OracleVerdict};
use aqin_core::mappings::{check_quasi_i_nonexpansive, sample_ball, witness_pair, zoo, SampleConfig};
use aqin_core::schedule::{generate_error_term, index_decompose, validate_conditions, HypothesisSet, Verdict};
use aqin_core::solver::{implicit_step, run_scheme, InnerOptions};
use aqin_core::vectorspace::{distance, NormKind};
use aqin_core::{AsymptoticRate, ErrorTermSpec, FamilyConfig, IterationTrace, ScheduleParams, SeqSpec, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mapping(name: &str, d: usize) -> aqin_core::MappingSpec {
    zoo(name, d).unwrap().into_mapping().unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aqin"))
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn text(out: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    )
}

fn run_named(name: &str) -> (ExperimentConfig, FamilyConfig, IterationTrace) {
    let cfg = lookup(name).unwrap();
    let fam = cfg.build_family().unwrap();
    let trace = run_scheme(&fam, &cfg.schedule, &cfg.x0().unwrap(), &cfg.run_options()).unwrap();
    (cfg, fam, trace)
}

fn witness_values() -> Outcome {
    for d in [2, 3, 8, 16] {
        let (t, i) = (mapping("paper_T", d), mapping("paper_I", d));
        let (x0, y0) = witness_pair(d);
        let gt = distance(&t.apply(&x0).unwrap(), &t.apply(&y0).unwrap(), NormKind::L2).unwrap();
        let gi = distance(&i.apply(&x0).unwrap(), &i.apply(&y0).unwrap(), NormKind::L2).unwrap();
        ensure((gt - 15.0 / 16.0).abs() <= 1e-12, || {
            format!("d = {d}: ||Tx0 - Ty0|| = {gt}")
        })?;
        ensure((gi - 3.0 / 4.0).abs() <= 1e-12, || {
            format!("d = {d}: ||Ix0 - Iy0|| = {gi}")
        })?;
    }
    Ok("15/16 and 3/4 at d = 2, 3, 8, 16".into())
}

/// `T^n x` and `I^n x` for the truncated shifts: coordinate `i >= n` is `x_{i-n}^(e^n)`.
fn shift_power(x: &[f64], e: i32, n: usize) -> Vec<f64> {
    let p = e.pow(n as u32);
    (0..x.len())
        .map(|i| if i >= n { x[i - n].powi(p) } else { 0.0 })
        .collect()
}

fn quasi_i_nonexpansive() -> Outcome {
    let d = 8;
    let cfg = SampleConfig {
        n_max: 5,
        samples: 10_000,
        seed: 2024,
    };
    let report = check_quasi_i_nonexpansive(
        &mapping("paper_T", d),
        &mapping("paper_I", d),
        &[Vector::zeros(d)],
        &AsymptoticRate::ConstantOne,
        cfg,
    )
    .map_err(|e| e.to_string())?;
    ensure(report.holds, || format!("checker found a violation: {report:?}"))?;
    ensure(report.instances == 50_000, || format!("{} instances", report.instances))?;
    // independent evaluation of the same inequality on the same points
    let mut violations = 0;
    for x in sample_ball(d, 1.0, cfg.samples, cfg.seed, NormKind::L2) {
        for n in 1..=cfg.n_max {
            let tn = shift_power(x.as_slice(), 4, n);
            let in_ = shift_power(x.as_slice(), 2, n);
            let l2 = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if l2(&tn) > l2(&in_) + 1e-9 {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || {
        format!("{violations} violations in the direct evaluation")
    })?;
    Ok(format!(
        "0 violations over {} (x, n) pairs, worst gap {:e}",
        report.instances, report.worst_violation
    ))
}

fn inner_solver_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    for case in 0..1_000 {
        let a: f64 = rng.random_range(0.05..=0.95);
        let beta: f64 = rng.random_range(0.01..0.95);
        let gamma: f64 = rng.random_range(0.0..(1.0 - beta));
        let beta_hat: f64 = rng.random_range(0.0..1.0);
        let gamma_hat: f64 = rng.random_range(0.0..(1.0 - beta_hat));
        let x_prev: f64 = rng.random_range(-1.0..1.0);
        let u: f64 = rng.random_range(-1.0..1.0);
        let v: f64 = rng.random_range(-1.0..1.0);
        let name = format!("linear_contraction({a})");
        let fam = FamilyConfig::new(vec![mapping(&name, 1)], vec![mapping(&name, 1)], vec![Vector::zeros(1)])
            .map_err(|e| e.to_string())?;
        let scalar = |s: f64| Vector::new(vec![s]).unwrap();
        let params = ScheduleParams {
            beta: SeqSpec::Constant(beta),
            gamma: SeqSpec::Constant(gamma),
            beta_hat: SeqSpec::Constant(beta_hat),
            gamma_hat: SeqSpec::Constant(gamma_hat),
            error_u: ErrorTermSpec::Explicit(vec![scalar(u)]),
            error_v: ErrorTermSpec::Explicit(vec![scalar(v)]),
        };
        let step = implicit_step(&scalar(x_prev), 1, &fam, &params, &InnerOptions::default())
            .map_err(|e| format!("case {case}: {e}"))?;
        let (alpha, alpha_hat) = (1.0 - beta - gamma, 1.0 - beta_hat - gamma_hat);
        // x = alpha x_prev + beta a (alpha^ x + beta^ a x + gamma^ v) + gamma u, solved for x
        let expected =
            (alpha * x_prev + beta * a * gamma_hat * v + gamma * u) / (1.0 - beta * a * (alpha_hat + beta_hat * a));
        let err = (step.x.as_slice()[0] - expected).abs();
        worst = worst.max(err);
        ensure(err <= 1e-10, || {
            format!("case {case}: got {}, closed form {expected}", step.x.as_slice()[0])
        })?;
    }
    Ok(format!("1000 instances, worst error {worst:e}"))
}

/// Independent per-step recurrence check: `b_n`, `c_n(p)` rebuilt from the
/// schedule and regenerated error terms.
fn recurrence_violations(cfg: &ExperimentConfig, fam: &FamilyConfig, trace: &IterationTrace) -> Result<usize, String> {
    let h = cfg
        .schedule
        .max_horizon()
        .map_or(cfg.validation_horizon, |m| m.min(cfg.validation_horizon));
    let sup = |f: &dyn Fn(usize) -> f64| (1..=h).map(f).fold(0.0f64, f64::max);
    let b_star = sup(&|n| cfg.schedule.coefficients(n).unwrap().beta);
    let lambda_sup = sup(&|n| fam.lambda().value(n));
    let mu_sup = sup(&|n| fam.mu().value(n));
    let margin = 1.0 - b_star * (lambda_sup * mu_sup).powi(2);
    let kind = fam.norm_kind();
    let mut bad = 0;
    for s in &trace.steps {
        let c = cfg.schedule.coefficients(s.n).unwrap();
        let lm = fam.lambda().value(s.k) * fam.mu().value(s.k);
        let b = (lm * lm - 1.0) * c.beta / margin;
        if (b - s.recurrence_b).abs() > 1e-12 {
            return Err(format!("step {}: stored b_n {} differs from {b}", s.n, s.recurrence_b));
        }
        let u = generate_error_term(&cfg.schedule.error_u, s.n, fam.dim(), fam.domain_radius()).unwrap();
        let v = generate_error_term(&cfg.schedule.error_v, s.n, fam.dim(), fam.domain_radius()).unwrap();
        let prev = trace.iterate(s.n - 1).unwrap();
        for p in fam.common_f() {
            let d = |a: &Vector| distance(a, p, kind).unwrap();
            let c_p = (c.gamma * d(&u) + c.beta * lm * c.gamma_hat * d(&v)) / margin;
            if d(&s.x) > (1.0 + b) * d(prev) + c_p + 1e-9 {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn recurrence_suite() -> Outcome {
    let mut runs: Vec<(String, ExperimentConfig)> = SCENARIOS
        .iter()
        .map(|(n, _)| (n.to_string(), lookup(n).unwrap()))
        .collect();
    let mut files: Vec<PathBuf> = std::fs::read_dir(config_path(""))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    for f in files {
        let cfg = ExperimentConfig::load(&f).map_err(|e| e.to_string())?;
        runs.push((f.file_name().unwrap().to_string_lossy().into_owned(), cfg));
    }
    let (mut checked, mut skipped, mut steps) = (0, 0, 0);
    for (name, cfg) in runs {
        let fam = cfg.build_family().map_err(|e| e.to_string())?;
        let trace = match run_scheme(&fam, &cfg.schedule, &cfg.x0().unwrap(), &cfg.run_options()) {
            Ok(t) => t,
            Err(aqin_core::Error::ConditionFailed { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(format!("{name}: {e}")),
        };
        let bad = recurrence_violations(&cfg, &fam, &trace)?;
        ensure(bad == 0, || format!("{name}: {bad} violated (step, p) pairs"))?;
        ensure(trace.all_recurrences_hold(), || {
            format!("{name}: a stored recurrence flag is false")
        })?;
        checked += 1;
        steps += trace.steps.len();
    }
    Ok(format!(
        "0 violations over {steps} steps in {checked} runs ({skipped} refused by the validator)"
    ))
}

fn residual_decay(name: &'static str) -> impl FnOnce() -> Outcome {
    move || {
        let (cfg, _, trace) = run_named(name);
        ensure(cfg.horizon <= 2_000, || format!("horizon {}", cfg.horizon))?;
        let first = trace
            .steps
            .iter()
            .find(|s| s.max_residual_t() <= 1e-5 && s.max_residual_i() <= 1e-5)
            .ok_or_else(|| format!("{name}: residuals never reached 1e-5 in {} steps", trace.steps.len()))?;
        let last = trace.last().unwrap();
        ensure(last.max_residual_t().max(last.max_residual_i()) <= 1e-5, || {
            format!("{name}: final residual")
        })?;
        Ok(format!("{name}: max residual <= 1e-5 from n = {}", first.n))
    }
}

fn distance_monitor() -> Outcome {
    let mut lines = Vec::new();
    for name in ["paper-example-d8", "scaled-family-n3"] {
        let (_, fam, trace) = run_named(name);
        let kind = fam.norm_kind();
        let d_f = |x: &Vector| {
            fam.common_f()
                .iter()
                .map(|p| distance(x, p, kind).unwrap())
                .fold(f64::INFINITY, f64::min)
        };
        let mut prev = d_f(&trace.x0);
        for s in &trace.steps {
            let now = d_f(&s.x);
            ensure(now <= (1.0 + s.recurrence_b) * prev + s.recurrence_c + 1e-9, || {
                format!("{name}: step {} breaks the distance bound", s.n)
            })?;
            prev = now;
        }
        ensure(prev <= 1e-6, || format!("{name}: final dist_F = {prev}"))?;
        lines.push(format!("{name} final dist_F {prev:e}"));
    }
    Ok(lines.join(", "))
}

fn tan_xu_discrimination() -> Outcome {
    let mut a = vec![1.0f64];
    let (mut b, mut c) = (Vec::new(), Vec::new());
    for n in 1..200 {
        let t = 0.5f64.powi(n);
        a.push((1.0 + t) * a[n as usize - 1] + t);
        b.push(t);
        c.push(t);
    }
    let geo = tan_xu_oracle(&RecurrenceWitness::new(a, b, c).map_err(|e| e.to_string())?, 50, 1e-8)
        .map_err(|e| e.to_string())?;
    ensure(geo.verdict == OracleVerdict::Converged, || {
        format!("geometric instance: {geo:?}")
    })?;

    let len = 10_000;
    let mut h = Vec::with_capacity(len);
    let mut acc = 0.0;
    for n in 1..=len {
        acc += 1.0 / n as f64;
        h.push(acc);
    }
    let hc: Vec<f64> = (1..len).map(|n| 1.0 / (n + 1) as f64).collect();
    let harmonic = tan_xu_oracle(
        &RecurrenceWitness::new(h, vec![0.0; len - 1], hc).map_err(|e| e.to_string())?,
        50,
        1e-8,
    )
    .map_err(|e| e.to_string())?;
    ensure(harmonic.verdict == OracleVerdict::Undecided, || {
        format!("harmonic instance: {harmonic:?}")
    })?;
    Ok(format!(
        "2^-n converged (limit {:.12}), harmonic undecided (defect {:e})",
        geo.limit_estimate.unwrap(),
        harmonic.cauchy_defect
    ))
}

fn index_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100_000 {
        let big_n: usize = rng.random_range(1..=64);
        let n: usize = rng.random_range(1..=1_000_000);
        let idx = index_decompose(n, big_n).map_err(|e| e.to_string())?;
        ensure((idx.k - 1) * big_n + idx.j == n && (1..=big_n).contains(&idx.j), || {
            format!("n = {n}, N = {big_n}")
        })?;
        // oracle: k = ceil(n / N)
        ensure(idx.k == n.div_ceil(big_n), || format!("k({n}) for N = {big_n}"))?;
        if n > big_n {
            let back = index_decompose(n - big_n, big_n).map_err(|e| e.to_string())?;
            ensure(back.k == idx.k - 1 && back.j == idx.j, || {
                format!("shift law at n = {n}, N = {big_n}")
            })?;
        }
    }
    Ok("100000 random (n, N) pairs".into())
}

fn condition_validator() -> Outcome {
    let one = AsymptoticRate::ConstantOne;
    let params = |beta: f64, gamma: SeqSpec| ScheduleParams {
        beta: SeqSpec::Constant(beta),
        gamma: gamma.clone(),
        beta_hat: SeqSpec::Constant(0.5),
        gamma_hat: gamma,
        error_u: ErrorTermSpec::Zero,
        error_v: ErrorTermSpec::Zero,
    };
    let r = validate_conditions(
        &params(0.5, SeqSpec::Power { c: 1.0, q: 2.0 }),
        &one,
        &one,
        100,
        HypothesisSet::Recurrence,
    );
    ensure(
        r.cond_iii.verdict == Verdict::Pass && r.cond_v.verdict == Verdict::Pass,
        || format!("example 1: {} / {}", r.cond_iii, r.cond_v),
    )?;
    let two = AsymptoticRate::Power { c: 1.0, q: 1.0 };
    let r = validate_conditions(
        &params(0.3, SeqSpec::Constant(0.0)),
        &two,
        &one,
        100,
        HypothesisSet::Recurrence,
    );
    ensure(r.cond_iii.verdict == Verdict::Fail, || {
        format!("example 2: {}", r.cond_iii)
    })?;
    let rate = AsymptoticRate::Power { c: 1.0, q: 2.0 };
    let r = validate_conditions(
        &params(0.5, SeqSpec::Constant(0.0)),
        &rate,
        &rate,
        100,
        HypothesisSet::Recurrence,
    );
    ensure(r.cond_ii.verdict == Verdict::Pass, || {
        format!("example 3: {}", r.cond_ii)
    })?;

    let cases: [(&[&str], i32, &str); 6] = [
        (&["validate", "--scenario", "paper-example-d8"], 0, "(v)    PASS"),
        (&["run", "--config", "fails-iii.json"], 2, "condition (iii)"),
        (&["validate", "--config", "fails-v-harmonic.json"], 2, "condition (v)"),
        (
            &["validate", "--config", "explicit-beta.json"],
            0,
            "(ii)   INDETERMINATE",
        ),
        (&["check-mappings", "nonexistent"], 2, "unknown zoo name"),
        (
            &["check-mappings", "linear_contraction a=2", "--dim", "2"],
            1,
            "falsified",
        ),
    ];
    let out_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (args, code, needle) in cases {
        let mut cmd = bin();
        for a in args {
            cmd.arg(if a.ends_with(".json") {
                config_path(a).into_os_string()
            } else {
                a.into()
            });
        }
        let out = cmd.current_dir(out_dir.path()).output().map_err(|e| e.to_string())?;
        let body = text(&out);
        ensure(out.status.code() == Some(code), || {
            format!("{args:?}: exit {:?}\n{body}", out.status.code())
        })?;
        ensure(body.contains(needle), || {
            format!("{args:?}: output lacks `{needle}`\n{body}")
        })?;
    }
    Ok("3 validator examples, 6 exit-code cases".into())
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut csvs = Vec::new();
    for d in &dirs {
        let out = bin()
            .args(["run", "--config"])
            .arg(config_path("paper-example-d8.json"))
            .arg("--out-dir")
            .arg(d.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || text(&out))?;
        csvs.push(std::fs::read(d.path().join("trace.csv")).map_err(|e| e.to_string())?);
    }
    ensure(csvs[0] == csvs[1], || "CSV bytes differ".into())?;
    Ok(format!("two runs, {} identical bytes", csvs[0].len()))
}

type Criterion = (u32, &'static str, Duration, Box<dyn FnOnce() -> Outcome>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "witness pair values",
            Duration::from_secs(1),
            Box::new(witness_values),
        ),
        (
            2,
            "quasi-I-nonexpansivity of paper_T, paper_I",
            Duration::from_secs(10),
            Box::new(quasi_i_nonexpansive),
        ),
        (
            3,
            "inner-solver closed-form oracle",
            Duration::from_secs(5),
            Box::new(inner_solver_oracle),
        ),
        (
            4,
            "per-step recurrence on shipped scenarios",
            Duration::MAX,
            Box::new(recurrence_suite),
        ),
        (
            5,
            "residual decay, paper-example-d8",
            Duration::from_secs(30),
            Box::new(residual_decay("paper-example-d8")),
        ),
        (
            5,
            "residual decay, scaled-family-n3",
            Duration::from_secs(30),
            Box::new(residual_decay("scaled-family-n3")),
        ),
        (6, "distance-to-F monitor", Duration::MAX, Box::new(distance_monitor)),
        (
            7,
            "Tan-Xu oracle discrimination",
            Duration::from_secs(2),
            Box::new(tan_xu_discrimination),
        ),
        (8, "index laws", Duration::from_secs(1), Box::new(index_laws)),
        (
            9,
            "condition validator and exit codes",
            Duration::MAX,
            Box::new(condition_validator),
        ),
        (10, "byte-identical CSV", Duration::MAX, Box::new(determinism)),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; exceeded {budget:?}")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!(
            "criterion {id:>2} [{tag}] {name} ({:.3} s): {detail}",
            elapsed.as_secs_f64()
        );
        failed += usize::from(outcome.is_err());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
