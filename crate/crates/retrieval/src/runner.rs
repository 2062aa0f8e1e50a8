//! Executes the tasks of a run file and assembles the report.

use std::time::Instant;

use retrieval_core::frame::{
    does_norm_retrieval, does_phase_retrieval, frame_bounds, is_full_spark, riesz_bounds, spark, tightness_constant,
    RieszBounds,
};
use retrieval_core::fusion::{
    concat_onb_falsifier_pr, decide_norm_retrieval, fusion_bounds, t13_sign_condition, Budget, PrFalsification,
};
use retrieval_core::perturbation::{
    build_s_operator, full_spark_density_experiment, normalization_stability_check, nr_failure_stability_experiment,
    BoundKind, BoundReport, PerturbationSetup,
};
use retrieval_core::scalar::{format_rational, Mode, DEFAULT_EPS};
use retrieval_core::sequences::{
    bessel_violation_probe, finitely_full_spark_check, truncated_complement_property, Truncation,
};
use retrieval_core::{Decision, Frame, FusionFrame, SearchOptions};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::cert::{self, Certificate};
use crate::input::{RunConfig, Task, TaskKind};
use crate::suites::run_suite;

pub const SCHEMA: &str = "1";

/// Exit status of a run.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const EXPECTATION_MISMATCH: i32 = 2;
    pub const PARSE_ERROR: i32 = 3;
    pub const TASK_ERROR: i32 = 4;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Adds wall-clock timings, which makes reports non-reproducible.
    pub timings: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: Value,
    pub exit_code: i32,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct TaskOutput {
    outcome: String,
    rule: Option<&'static str>,
    certificates: Vec<Certificate>,
    details: Value,
    caveats: Vec<String>,
}

impl TaskOutput {
    fn new(outcome: impl Into<String>, details: Value) -> Self {
        Self {
            outcome: outcome.into(),
            rule: None,
            certificates: Vec::new(),
            details,
            caveats: Vec::new(),
        }
    }

    fn pass_fail(passed: bool, details: Value) -> Self {
        Self::new(if passed { "pass" } else { "fail" }, details)
    }

    fn cert(mut self, c: Option<Certificate>) -> Self {
        self.certificates.extend(c);
        self
    }

    fn caveat(mut self, c: impl Into<String>) -> Self {
        self.caveats.push(c.into());
        self
    }
}

#[derive(Debug)]
enum TaskError {
    Core(retrieval_core::Error),
    Missing(&'static str),
}

impl From<retrieval_core::Error> for TaskError {
    fn from(e: retrieval_core::Error) -> Self {
        TaskError::Core(e)
    }
}

impl std::fmt::Display for TaskError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TaskError::Core(e) => write!(f, "{e}"),
            TaskError::Missing(what) => write!(f, "task requires a {what} in the input"),
        }
    }
}

type TaskResult = Result<TaskOutput, TaskError>;

const EXHAUSTIVE: &str = "exhaustive partition sweep; no compact certificate";

struct Ctx<'a> {
    config: &'a RunConfig,
    opts: SearchOptions,
}

impl<'a> Ctx<'a> {
    fn frame(&self) -> Result<&'a Frame, TaskError> {
        self.config.frame.as_ref().ok_or(TaskError::Missing("frame"))
    }

    fn fusion(&self) -> Result<&'a FusionFrame, TaskError> {
        self.config.fusion.as_ref().ok_or(TaskError::Missing("fusion frame"))
    }

    /// Float tolerance for inherently floating-point tasks, even in exact runs.
    fn float_mode(&self) -> (Mode, Option<String>) {
        match self.config.mode {
            Mode::Exact => (
                Mode::Float { eps: DEFAULT_EPS },
                Some(format!("floating point with eps = {DEFAULT_EPS:e} in an exact run")),
            ),
            m => (m, None),
        }
    }

    fn budget(&self) -> Budget {
        Budget {
            trials: self.config.trials,
            seed: self.config.seed,
        }
    }
}

fn bound_report_json(r: &BoundReport) -> Value {
    json!({
        "items": r.items.iter().map(|i| json!({
            "name": i.name,
            "measured": i.measured,
            "bound": i.bound,
            "kind": match i.kind { BoundKind::AtMost => "at-most", BoundKind::AtLeast => "at-least" },
            "holds": i.holds,
        })).collect::<Vec<_>>(),
        "notes": r.notes,
    })
}

fn task_pr(ctx: &Ctx) -> TaskResult {
    let f = ctx.frame()?;
    Ok(match does_phase_retrieval(f, &ctx.opts)? {
        Decision::CertifiedYes(e) => {
            TaskOutput::new("CertifiedYes", json!({ "max_subset": e.max_subset })).caveat(EXHAUSTIVE)
        }
        Decision::CertifiedNo(w) => {
            TaskOutput::new("CertifiedNo", json!({ "subset": w.subset })).cert(Some(Certificate::PrFail(w)))
        }
        Decision::Undecided(u) => TaskOutput::new("Undecided", json!({ "trials": u.trials })),
    })
}

fn task_nr(ctx: &Ctx) -> TaskResult {
    let f = ctx.frame()?;
    Ok(match does_norm_retrieval(f, &ctx.opts)? {
        Decision::CertifiedYes(e) => {
            TaskOutput::new("CertifiedYes", json!({ "max_subset": e.max_subset })).caveat(EXHAUSTIVE)
        }
        Decision::CertifiedNo(w) => {
            TaskOutput::new("CertifiedNo", json!({ "subset": w.subset })).cert(Some(Certificate::NrFail(w)))
        }
        Decision::Undecided(u) => TaskOutput::new("Undecided", json!({ "trials": u.trials })),
    })
}

fn task_spark(ctx: &Ctx) -> TaskResult {
    let f = ctx.frame()?;
    let s = spark(f, &ctx.opts);
    let full = s.value == f.dim() + 1;
    Ok(TaskOutput::new(
        "pass",
        json!({ "spark": s.value, "full_spark": full, "m": f.len(), "n": f.dim() }),
    )
    .cert(s.witness.map(Certificate::Dependency)))
}

fn task_full_spark(ctx: &Ctx) -> TaskResult {
    let f = ctx.frame()?;
    let r = is_full_spark(f, &ctx.opts)?;
    let outcome = if r.holds { "CertifiedYes" } else { "CertifiedNo" };
    Ok(TaskOutput::new(outcome, json!({ "m": f.len(), "n": f.dim() })).cert(r.witness.map(Certificate::Dependency)))
}

fn task_bounds(ctx: &Ctx) -> TaskResult {
    let (mode, caveat) = ctx.float_mode();
    let mut details = Map::new();
    let mut certificates = Vec::new();
    if let Some(f) = &ctx.config.frame {
        let (lo, hi) = frame_bounds(f, mode)?;
        let tight = tightness_constant(f);
        let riesz = match riesz_bounds(f, mode)? {
            RieszBounds::Riesz { lower, upper } => json!({ "lower": lower, "upper": upper }),
            RieszBounds::NotRiesz => Value::Null,
        };
        details.insert(
            "frame".into(),
            json!({
                "lower": lo,
                "upper": hi,
                "tight": tight.as_ref().map(format_rational),
                "riesz": riesz,
            }),
        );
        certificates.extend(tight.map(Certificate::FrameTight));
    }
    if let Some(ff) = &ctx.config.fusion {
        let (lo, hi) = fusion_bounds(ff, mode)?;
        let tight = retrieval_core::fusion::tightness_constant(ff);
        details.insert(
            "fusion".into(),
            json!({ "lower": lo, "upper": hi, "tight": tight.as_ref().map(format_rational) }),
        );
        certificates.extend(tight.map(|a| Certificate::FusionYes(retrieval_core::fusion::NrYes::Tight(a))));
    }
    if details.is_empty() {
        return Err(TaskError::Missing("frame or fusion frame"));
    }
    let mut out = TaskOutput::new("pass", Value::Object(details));
    out.certificates = certificates;
    out.caveats.extend(caveat);
    Ok(out)
}

fn task_fusion_nr(ctx: &Ctx) -> TaskResult {
    let ff = ctx.fusion()?;
    let v = decide_norm_retrieval(ff, &ctx.budget(), &ctx.opts)?;
    let mut out = match v.decision {
        Decision::CertifiedYes(y) => {
            let c = TaskOutput::new("CertifiedYes", json!({}));
            if y == retrieval_core::fusion::NrYes::RankOneFrame {
                c.caveat(EXHAUSTIVE).cert(Some(Certificate::FusionYes(y)))
            } else {
                c.cert(Some(Certificate::FusionYes(y)))
            }
        }
        Decision::CertifiedNo(w) => {
            let mut details = Map::new();
            if let Some((u, v)) = w.pair() {
                details.insert("u".into(), cert::vector(u));
                details.insert("v".into(), cert::vector(v));
                details.insert("u_measurements".into(), cert::vector(&ff.measurements(u)));
                details.insert("v_measurements".into(), cert::vector(&ff.measurements(v)));
                details.insert(
                    "u_norm_sq".into(),
                    json!(format_rational(&retrieval_core::matrix::norm_sq(u))),
                );
                details.insert(
                    "v_norm_sq".into(),
                    json!(format_rational(&retrieval_core::matrix::norm_sq(v))),
                );
            }
            TaskOutput::new("CertifiedNo", Value::Object(details)).cert(Some(Certificate::FusionNo(w)))
        }
        Decision::Undecided(u) => TaskOutput::new("Undecided", json!({ "trials": u.trials, "seed": u.seed })).caveat(
            format!("no rule applied and {} falsifier trials found no failure", u.trials),
        ),
    };
    out.rule = Some(v.rule.as_str());
    Ok(out)
}

fn task_fusion_pr_falsify(ctx: &Ctx, samples: usize) -> TaskResult {
    let ff = ctx.fusion()?;
    let (mode, caveat) = ctx.float_mode();
    let eps = mode.require_float()?;
    let d = concat_onb_falsifier_pr(ff, samples, ctx.config.seed, eps, &ctx.opts)?;
    let mut out = match d {
        Decision::CertifiedNo(w) => match &w {
            PrFalsification::Exact { sample, subset, .. } => {
                TaskOutput::new("CertifiedNo", json!({ "sample": sample, "subset": subset }))
                    .cert(Certificate::from_pr_falsification(&w))
            }
            PrFalsification::FloatConfidence { sample, subset } => {
                TaskOutput::new("Undecided", json!({ "sample": sample, "subset": subset }))
                    .caveat("sampled bases failed the complement property in floating point only")
            }
        },
        Decision::Undecided(u) => TaskOutput::new("Undecided", json!({ "samples": u.trials, "seed": u.seed }))
            .caveat("no sampled orthonormal concatenation failed the complement property"),
        Decision::CertifiedYes(()) => TaskOutput::new("Undecided", json!({})),
    };
    out.caveats.extend(caveat);
    Ok(out)
}

fn task_sign_condition(ctx: &Ctx) -> TaskResult {
    let ff = ctx.fusion()?;
    Ok(match t13_sign_condition(ff, &ctx.opts)? {
        Some(s) => TaskOutput::new("found", json!({ "epsilons": s.epsilons, "k": s.k }))
            .cert(Some(Certificate::SignCondition(s))),
        None => TaskOutput::new("not-found", json!({ "masks_tried": 1u64 << ff.len() })),
    })
}

fn task_stability(ctx: &Ctx, samples: usize) -> TaskResult {
    let f = ctx.frame()?;
    let r = nr_failure_stability_experiment(f, samples, ctx.config.seed, &ctx.opts)?;
    Ok(TaskOutput::pass_fail(
        r.all_fail(),
        json!({
            "subset": r.subset,
            "delta": r.delta,
            "epsilon": r.epsilon,
            "denominator": r.denominator,
            "samples": r.samples,
            "still_failing": r.still_failing,
            "regained": r.regained,
            "max_total_perturbation": r.max_total,
        }),
    ))
}

fn task_density(ctx: &Ctx, samples: usize, grid: u64) -> TaskResult {
    let f = ctx.frame()?;
    let r = full_spark_density_experiment(f, samples, ctx.config.seed, grid, &ctx.opts)?;
    Ok(TaskOutput::pass_fail(
        r.exceptions.is_empty(),
        json!({
            "samples": r.samples,
            "grid": r.grid,
            "original_full_spark": r.original_full_spark,
            "full_spark": r.full_spark,
            "full_spark_fraction": r.full_spark_fraction(),
            "pr_yes": r.pr_yes,
            "exceptions": r.exceptions,
        }),
    ))
}

fn task_s_operator(ctx: &Ctx, p: &crate::input::SOperatorParams) -> TaskResult {
    let (mode, caveat) = ctx.float_mode();
    let setup = PerturbationSetup::new(p.x.clone(), p.images.clone(), p.epsilon)?;
    let r = build_s_operator(&setup, mode)?;
    let mut details = bound_report_json(&r.report);
    details["distance_from_identity"] = json!(setup.distance_from_identity());
    let mut out = TaskOutput::pass_fail(r.report.all_hold(), details);
    out.caveats.extend(caveat);
    Ok(out)
}

fn task_normalization(ctx: &Ctx, psi: &Frame, a: f64, b: f64) -> TaskResult {
    let phi = ctx.frame()?;
    let r = normalization_stability_check(phi, psi, a, b)?;
    Ok(TaskOutput::pass_fail(r.all_hold(), bound_report_json(&r)))
}

fn run_task(ctx: &Ctx, task: &Task) -> TaskResult {
    match &task.kind {
        TaskKind::Analyze => task_analyze(ctx),
        TaskKind::Pr => task_pr(ctx),
        TaskKind::Nr => task_nr(ctx),
        TaskKind::Spark => task_spark(ctx),
        TaskKind::FullSpark => task_full_spark(ctx),
        TaskKind::Bounds => task_bounds(ctx),
        TaskKind::FusionNr => task_fusion_nr(ctx),
        TaskKind::FusionPrFalsify { samples } => task_fusion_pr_falsify(ctx, *samples),
        TaskKind::SignCondition => task_sign_condition(ctx),
        TaskKind::PerturbNrStability { samples } => task_stability(ctx, *samples),
        TaskKind::Density { samples, grid } => task_density(ctx, *samples, *grid),
        TaskKind::SOperator(p) => task_s_operator(ctx, p),
        TaskKind::Normalization { psi, a, b } => task_normalization(ctx, psi, *a, *b),
        TaskKind::FinitelyFullSpark {
            rule,
            coords,
            truncation,
        } => {
            let r = finitely_full_spark_check(rule, coords, *truncation, &Truncation::default(), &ctx.opts)?;
            let out = TaskOutput::pass_fail(r.holds, json!({ "truncation": r.truncation, "witness": r.witness }));
            Ok(if r.holds {
                out.caveat(format!(
                    "consistent with finitely full spark up to N = {}",
                    r.truncation
                ))
            } else {
                out
            })
        }
        TaskKind::PairSumsCp { n } => {
            let r = truncated_complement_property(*n, &ctx.opts)?;
            let outcome = if r.holds { "CertifiedYes" } else { "CertifiedNo" };
            let witness = r.witness.map(|w| Certificate::PrFail(w).to_json());
            Ok(TaskOutput::new(
                outcome,
                json!({ "n": r.n, "vectors": n * n.saturating_sub(1) / 2, "witness": witness }),
            )
            .caveat("truncated evidence only: pair sums restricted to the first n coordinates"))
        }
        TaskKind::BesselProbe { n } => {
            let table = bessel_violation_probe(*n)?;
            let linear = table.iter().all(|&(t, v)| v + 1 == t as u64);
            let rows: Vec<Value> = table.iter().map(|&(t, v)| json!([t, v])).collect();
            Ok(TaskOutput::pass_fail(linear, json!({ "table": rows }))
                .caveat("truncated evidence only: growth is sampled up to n"))
        }
        TaskKind::VerifyTheorem { theorem, samples } => {
            let r = run_suite(*theorem, *samples, ctx.config.seed, ctx.config.mode, &ctx.opts)?;
            Ok(TaskOutput::pass_fail(r.passed, r.details))
        }
    }
}

/// Spark, full spark, phase and norm retrieval and bounds of the frame; the
/// fusion decision and bounds of the fusion frame.
fn task_analyze(ctx: &Ctx) -> TaskResult {
    let mut details = Map::new();
    let mut certificates = Vec::new();
    let mut caveats = Vec::new();
    let mut absorb = |name: &str, r: TaskOutput| {
        let mut v = Map::new();
        v.insert("outcome".into(), json!(r.outcome));
        if let Some(rule) = r.rule {
            v.insert("rule".into(), json!(rule));
        }
        v.insert("details".into(), r.details);
        details.insert(name.into(), Value::Object(v));
        certificates.extend(r.certificates);
        caveats.extend(r.caveats.into_iter().map(|c| format!("{name}: {c}")));
    };
    if let Some(f) = &ctx.config.frame {
        absorb("spark", task_spark(ctx)?);
        if f.len() >= f.dim() {
            absorb("full-spark", task_full_spark(ctx)?);
        }
        absorb("pr", task_pr(ctx)?);
        absorb("nr", task_nr(ctx)?);
    }
    if ctx.config.fusion.is_some() {
        absorb("fusion-nr", task_fusion_nr(ctx)?);
    }
    if ctx.config.frame.is_none() && ctx.config.fusion.is_none() {
        return Err(TaskError::Missing("frame or fusion frame"));
    }
    absorb("bounds", task_bounds(ctx)?);
    let mut out = TaskOutput::new("pass", Value::Object(details));
    out.certificates = certificates;
    out.caveats = caveats;
    Ok(out)
}

pub fn run(config: &RunConfig, input_bytes: &[u8], options: RunOptions) -> Report {
    let ctx = Ctx {
        config,
        opts: SearchOptions {
            jobs: config.jobs,
            max_members: config.max_members,
        },
    };
    let mut tasks = Vec::new();
    let (mut mismatches, mut errors) = (0usize, 0usize);
    for (index, task) in config.tasks.iter().enumerate() {
        let start = Instant::now();
        let result = run_task(&ctx, task);
        let elapsed = start.elapsed();
        let mut t = Map::new();
        t.insert("index".into(), json!(index));
        t.insert("task".into(), json!(task.name));
        let outcome = match result {
            Ok(out) => {
                t.insert("outcome".into(), json!(out.outcome));
                if let Some(rule) = out.rule {
                    t.insert("rule".into(), json!(rule));
                }
                t.insert(
                    "certificates".into(),
                    Value::Array(out.certificates.iter().map(Certificate::to_json).collect()),
                );
                t.insert("details".into(), out.details);
                t.insert("caveats".into(), json!(out.caveats));
                out.outcome
            }
            Err(e) => {
                t.insert("outcome".into(), json!("error"));
                t.insert("error".into(), json!(e.to_string()));
                "error".to_string()
            }
        };
        if let Some(expect) = task.expect {
            let met = expect.matches(&outcome);
            t.insert("expect".into(), json!(expect.as_str()));
            t.insert("expectation".into(), json!(if met { "met" } else { "mismatch" }));
            mismatches += !met as usize;
        } else if outcome == "error" {
            errors += 1;
        }
        if options.timings {
            t.insert("timing_ms".into(), json!(elapsed.as_secs_f64() * 1e3));
        }
        tasks.push(Value::Object(t));
    }
    let (mode, eps) = match config.mode {
        Mode::Exact => ("exact", Value::Null),
        Mode::Float { eps } => ("float", json!(eps)),
    };
    let json = json!({
        "schema": SCHEMA,
        "input_sha256": sha256_hex(input_bytes),
        "name": config.name,
        "mode": mode,
        "eps": eps,
        "seed": config.seed,
        "trials": config.trials,
        "max_subset_bits": config.max_members,
        "tasks": tasks,
        "summary": { "tasks": config.tasks.len(), "mismatches": mismatches, "errors": errors },
    });
    let exit_code = if mismatches > 0 {
        exit::EXPECTATION_MISMATCH
    } else if errors > 0 {
        exit::TASK_ERROR
    } else {
        exit::OK
    };
    Report { json, exit_code }
}

/// Human-readable summary, one line per task.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    if let Some(name) = report["name"].as_str() {
        out.push_str(&format!("{name}\n"));
    }
    out.push_str(&format!(
        "input sha256 {}  mode {}  seed {}\n",
        report["input_sha256"].as_str().unwrap_or("?"),
        report["mode"].as_str().unwrap_or("?"),
        report["seed"]
    ));
    for t in report["tasks"].as_array().into_iter().flatten() {
        let mut line = format!(
            "  [{}] {:<24} {}",
            t["index"],
            t["task"].as_str().unwrap_or("?"),
            t["outcome"].as_str().unwrap_or("?")
        );
        if let Some(rule) = t["rule"].as_str() {
            line.push_str(&format!("  (rule: {rule})"));
        }
        if let Some(e) = t["expectation"].as_str() {
            line.push_str(&format!("  expect {} {e}", t["expect"].as_str().unwrap_or("?")));
        }
        if let Some(e) = t["error"].as_str() {
            line.push_str(&format!("  error: {e}"));
        }
        out.push_str(&line);
        out.push('\n');
        for c in t["caveats"].as_array().into_iter().flatten() {
            out.push_str(&format!("      caveat: {}\n", c.as_str().unwrap_or("")));
        }
    }
    out
}
