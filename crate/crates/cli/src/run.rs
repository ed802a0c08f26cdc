//! Executes a `RunConfig` and assembles the report.

use std::io::Write;
use std::path::Path;

use infra1d::analysis::{
    bound_dlog, bound_dlog_max, bound_dlog_simplified, bound_periodic, bound_psuccess_circ, coprime_experiment,
    geomsum_sweep,
};
use infra1d::dlog::{DlogConfig, DlogResult, DlogRun};
use infra1d::infra::{Backend, ExactOracle, Infrastructure};
use infra1d::period::{CircumferenceConfig, CircumferenceResult, CircumferenceRun};
use infra1d::quad::{pell_solution, QuadraticInfra};
use infra1d::rng::{derive_rng, stream};
use infra1d::{Error, ScaledReal};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Formula, Pipeline, RunConfig, SCHEMA_VERSION};

/// Largest number of probabilities written to a trace file.
pub const TRACE_CAP: usize = 1 << 20;
const TRACE_MAGIC: &[u8; 8] = b"I1DTRACE";

pub const SEED_SCHEME: &str = "ChaCha8 streams seeded by splitmix64(splitmix64(seed ^ stream*0x9E3779B97F4A7C15) ^ (index+1)*0xBF58476D1CE4E5B9); streams: shift=1, trial=2, sweep=5, circumference=6";

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const VERDICT_FAILED: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const CAP_EXCEEDED: i32 = 3;
    pub const CERTIFICATION: i32 = 4;
    pub const RUNTIME: i32 = 5;
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub seed_scheme: String,
    pub pass: bool,
    pub exit_code: i32,
    pub verdicts: Vec<Verdict>,
    pub result: Value,
    pub bounds: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
}

#[derive(Default)]
struct Outcome {
    verdicts: Vec<Verdict>,
    result: Value,
    bounds: Vec<Value>,
    distribution: Option<(Vec<u64>, Vec<f64>)>,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::ZeroScale | Error::Config(_) | Error::MalformedElement(_) | Error::Precondition(_) => {
            exit::INVALID_INPUT
        }
        Error::StepBudget { .. } | Error::MemoryCap { .. } | Error::TrialsExhausted { .. } => exit::CAP_EXCEEDED,
        Error::Certification(_) => exit::CERTIFICATION,
        Error::Precision(_) | Error::EstimateTooCoarse(_) => exit::RUNTIME,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::ZeroScale => "zero_scale",
        Error::Config(_) => "config",
        Error::MalformedElement(_) => "malformed_element",
        Error::Precondition(_) => "precondition",
        Error::StepBudget { .. } => "step_budget",
        Error::MemoryCap { .. } => "memory_cap",
        Error::TrialsExhausted { .. } => "trials_exhausted",
        Error::Certification(_) => "certification",
        Error::Precision(_) => "precision",
        Error::EstimateTooCoarse(_) => "estimate_too_coarse",
    }
}

/// Runs the pipeline, writes the report (and trace) when requested, and
/// returns the report.
pub fn run(config: &RunConfig) -> std::io::Result<Report> {
    let outcome = execute(config);
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        seed_scheme: SEED_SCHEME.into(),
        pass: false,
        exit_code: exit::PASS,
        verdicts: Vec::new(),
        result: Value::Null,
        bounds: Vec::new(),
        error: None,
    };
    match outcome {
        Ok(out) => {
            report.pass = !out.verdicts.is_empty() && out.verdicts.iter().all(|v| v.pass);
            report.exit_code = if report.pass { exit::PASS } else { exit::VERDICT_FAILED };
            report.verdicts = out.verdicts;
            report.result = out.result;
            report.bounds = out.bounds;
            if let (Some(path), Some((dims, probs))) = (&config.trace, out.distribution) {
                write_trace(path, &dims, &probs)?;
            }
        }
        Err(e) => {
            report.exit_code = exit_code_for(&e);
            report.error = Some(ErrorReport { kind: error_kind(&e).into(), message: e.to_string() });
        }
    }
    if let Some(path) = &config.report {
        std::fs::write(path, serde_json::to_vec_pretty(&report).map_err(std::io::Error::other)?)?;
    }
    Ok(report)
}

/// `I1DTRACE`, then little-endian `u32` version, `u32` rank, the `u64`
/// dimensions, the `u64` total length, the `u64` number of values written
/// (at most `TRACE_CAP`) and the `f64` probabilities.
pub fn write_trace(path: &Path, dims: &[u64], probs: &[f64]) -> std::io::Result<()> {
    let n = probs.len().min(TRACE_CAP);
    let mut buf = Vec::with_capacity(32 + 8 * dims.len() + 8 * n);
    buf.extend_from_slice(TRACE_MAGIC);
    buf.extend_from_slice(&1u32.to_le_bytes());
    buf.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for d in dims {
        buf.extend_from_slice(&d.to_le_bytes());
    }
    buf.extend_from_slice(&(probs.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    for p in &probs[..n] {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    std::fs::File::create(path)?.write_all(&buf)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

macro_rules! with_backend {
    ($backend:expr, $infra:ident => $body:expr) => {
        match $backend {
            Backend::Synthetic($infra) => $body,
            Backend::Cyclic($infra) => $body,
            Backend::Quadratic($infra) => $body,
        }
    };
}

fn execute(config: &RunConfig) -> infra1d::Result<Outcome> {
    match &config.pipeline {
        Pipeline::Circumference { backend, delta, q, prefer_pow2 } => {
            let cfg = CircumferenceConfig {
                delta: delta.clone(),
                q: *q,
                prefer_pow2: *prefer_pow2,
                max_trials: config.trials_cap,
                seed: config.seed,
                keep_trace: true,
                ..Default::default()
            };
            let built = backend.build()?;
            let want_trace = config.trace.is_some();
            let (res, dist) = with_backend!(&built, infra => circumference(infra, cfg, want_trace)?);
            let oracle = match &built {
                Backend::Synthetic(o) => Some(o.circumference()),
                Backend::Cyclic(g) => Some(g.circumference()),
                Backend::Quadratic(_) => None,
            };
            Ok(circumference_outcome(&built, res, oracle, delta, dist))
        }
        Pipeline::Dlog { backend, target, delta, r_hat, q_override, k_filter, kappa } => {
            let cfg = DlogConfig {
                delta: delta.clone(),
                r_hat: r_hat.clone(),
                q_override: *q_override,
                k_filter: *k_filter,
                max_trials: config.trials_cap,
                cell_cap: config.cell_cap as u128,
                seed: config.seed,
                keep_trace: true,
                ..Default::default()
            };
            let built = backend.build()?;
            let want_trace = config.trace.is_some();
            match &built {
                Backend::Synthetic(o) => dlog_exact(o, target, cfg, *kappa, want_trace),
                Backend::Cyclic(g) => dlog_exact(g, target, cfg, *kappa, want_trace),
                Backend::Quadratic(k) => {
                    let x = k.parse_element(target)?;
                    let (res, dist) = dlog(k, x, cfg, want_trace)?;
                    let mut out = dlog_outcome(&res, *kappa, dist)?;
                    out.verdicts.push(Verdict::new("dlog_found", true, "verified against the refined neighbourhood"));
                    Ok(out)
                }
            }
        }
        Pipeline::Pell { d, delta } => pell(*d, delta, config),
        Pipeline::Geomsum { trials } => {
            let rep = geomsum_sweep(*trials, config.seed)?;
            let detail = format!("{} violations", rep.inputs["violations"]);
            Ok(Outcome {
                verdicts: vec![Verdict::new("geomsum_no_counterexample", rep.verdict, detail)],
                result: to_value(&rep),
                ..Default::default()
            })
        }
        Pipeline::Coprime { trials, n } => {
            let mut rng = derive_rng(config.seed, stream::SWEEP, 0);
            let rep = coprime_experiment(*n, *trials, &mut rng)?;
            let detail = format!("frequency {:.6} over {} pairs", rep.empirical, rep.trials);
            Ok(Outcome {
                verdicts: vec![Verdict::new("coprime_at_least_half", rep.verdict, detail)],
                result: to_value(&rep),
                ..Default::default()
            })
        }
        Pipeline::Bounds { formula } => bounds(formula),
    }
}

fn circumference<I: Infrastructure>(
    infra: &I,
    cfg: CircumferenceConfig,
    want_trace: bool,
) -> infra1d::Result<(CircumferenceResult, Option<(Vec<u64>, Vec<f64>)>)> {
    let run = CircumferenceRun::new(infra, cfg)?;
    let res = run.run()?;
    let dist = match (want_trace, res.trace.first()) {
        (true, Some(t)) => Some((vec![run.q()], run.distribution(t.shift_index, t.offsets[0])?)),
        _ => None,
    };
    Ok((res, dist))
}

fn circumference_outcome(
    backend: &Backend,
    res: CircumferenceResult,
    oracle: Option<ScaledReal>,
    delta: &ScaledReal,
    distribution: Option<(Vec<u64>, Vec<f64>)>,
) -> Outcome {
    let mut verdicts = vec![Verdict::new("circumference_found", true, format!("R̂ = {}", res.r_hat.to_decimal(12)))];
    if let Some(r) = &oracle {
        let err = (&res.r_hat - r).abs();
        verdicts.push(Verdict::new(
            "within_delta_of_oracle",
            err <= *delta,
            format!("|R − R̂| = {} (δ = {})", err.to_decimal(12), delta.to_decimal(12)),
        ));
    }
    let p = with_backend!(backend, infra => infra.params().clone());
    let s = p.r_lower.mul_int(res.n).to_f64();
    let mut bounds = Vec::new();
    if let Ok(v) = bound_psuccess_circ(s, res.q as f64) {
        bounds.push(json!({"formula": "psuccess_circ", "S": s, "q": res.q, "value": v}));
    }
    if let Ok(v) = bound_periodic(res.n as f64, p.r_lower.to_f64(), p.d_min_lower.to_f64(), res.q as f64) {
        bounds.push(json!({"formula": "periodic", "N": res.n, "R": p.r_lower.to_f64(), "q": res.q, "value": v}));
    }
    Outcome {
        verdicts,
        result: json!({"r_hat": res.r_hat, "r_hat_decimal": res.r_hat.to_decimal(12), "oracle": oracle, "run": to_value(&res)}),
        bounds,
        distribution,
    }
}

fn dlog<I: Infrastructure>(
    infra: &I,
    x: I::Element,
    cfg: DlogConfig,
    want_trace: bool,
) -> infra1d::Result<(DlogResult, Option<(Vec<u64>, Vec<f64>)>)> {
    let run = DlogRun::new(infra, x, cfg)?;
    let res = run.run()?;
    let dist = if want_trace {
        let p = run.params();
        Some((vec![p.a, p.b], run.distribution(0, 0)?))
    } else {
        None
    };
    Ok((res, dist))
}

fn dlog_outcome(
    res: &DlogResult,
    kappa: Option<f64>,
    distribution: Option<(Vec<u64>, Vec<f64>)>,
) -> infra1d::Result<Outcome> {
    let p = &res.params;
    let p_g = DlogConfig::default().p_g.to_f64();
    let mut bounds = Vec::new();
    let chosen = match kappa {
        Some(k) => bound_dlog(p.q, p.b, p_g, k).ok().map(|v| (k, v)),
        None => bound_dlog_max(p.q, p.b, p_g)?.map(|c| (c.kappa, c.bound)),
    };
    if let Some((k, v)) = chosen {
        bounds.push(json!({"formula": "dlog", "q": p.q, "B": p.b, "p_g": p_g, "kappa": k, "value": v}));
    }
    Ok(Outcome {
        verdicts: Vec::new(),
        result: json!({
            "d_hat": res.d_hat,
            "d_hat_decimal": res.d_hat.to_decimal(12),
            "refined": res.refined,
            "refined_decimal": res.refined.as_ref().map(|r| r.to_decimal(12)), "run": to_value(res)}),
        bounds,
        distribution,
    })
}

fn circular_gap(a: &ScaledReal, b: &ScaledReal, r: &ScaledReal) -> ScaledReal {
    let d = (a - b).mod_reduce(r);
    let e = r - &d;
    d.min(e)
}

fn dlog_exact<I: ExactOracle>(
    infra: &I,
    target: &str,
    cfg: DlogConfig,
    kappa: Option<f64>,
    want_trace: bool,
) -> infra1d::Result<Outcome> {
    let x = infra.parse_element(target)?;
    let delta = cfg.delta.clone();
    let d = infra.oracle_distance(&x);
    let r = infra.circumference();
    let (res, dist) = dlog(infra, x, cfg, want_trace)?;
    let mut out = dlog_outcome(&res, kappa, dist)?;
    let raw = circular_gap(&res.d_hat, &d, &r);
    out.verdicts.push(Verdict::new(
        "within_one_of_oracle",
        raw <= ScaledReal::one(),
        format!("|d − d̂| = {}", raw.to_decimal(12)),
    ));
    if let Some(refined) = &res.refined {
        let err = circular_gap(refined, &d, &r);
        out.verdicts.push(Verdict::new(
            "refined_within_delta",
            err <= delta,
            format!("|d − refined| = {}", err.to_decimal(12)),
        ));
    }
    if let Value::Object(m) = &mut out.result {
        m.insert("oracle".into(), to_value(&d));
    }
    Ok(out)
}

fn pell(d: u64, delta: &ScaledReal, config: &RunConfig) -> infra1d::Result<Outcome> {
    let infra = QuadraticInfra::new(d)?;
    let cfg = CircumferenceConfig {
        delta: delta.clone(),
        max_trials: config.trials_cap,
        seed: config.seed,
        ..Default::default()
    };
    let run = CircumferenceRun::new(&infra, cfg)?;
    let res = run.run()?;
    let sol = pell_solution(d, &res.r_hat)?;
    let norm = &sol.pell_x * &sol.pell_x - BigInt::from(d) * &sol.pell_y * &sol.pell_y;
    let plus = &sol.plus_x * &sol.plus_x - BigInt::from(d) * &sol.plus_y * &sol.plus_y;
    let verdicts = vec![
        Verdict::new("fundamental_solution", norm == BigInt::from(sol.norm), format!("x² − D y² = {norm}")),
        Verdict::new("norm_plus_one_solution", plus == BigInt::from(1), format!("x² − D y² = {plus}")),
    ];
    let mut result = to_value(&sol);
    if let Value::Object(m) = &mut result {
        m.insert("regulator_decimal".into(), json!(sol.regulator.to_decimal(12)));
        m.insert("regulator_estimate".into(), to_value(&res.r_hat));
        m.insert("trials_used".into(), json!(res.trials_used));
    }
    Ok(Outcome { verdicts, result, ..Default::default() })
}

fn bounds(formula: &Formula) -> infra1d::Result<Outcome> {
    let (value, extra) = match formula {
        Formula::Psuccess { s, q } => (bound_psuccess_circ(*s, q.unwrap_or(f64::INFINITY))?, Value::Null),
        Formula::Periodic { n, r, d_min, q } => (bound_periodic(*n, *r, *d_min, *q)?, Value::Null),
        Formula::Dlog { q, b, p_g, kappa } => match kappa {
            Some(k) => (bound_dlog(*q, *b, *p_g, *k)?, json!({"kappa": k})),
            None => match bound_dlog_max(*q, *b, *p_g)? {
                Some(c) => (c.bound, json!({"kappa": c.kappa})),
                None => (0.0, json!({"kappa": null, "note": "empty admissible κ interval"})),
            },
        },
        Formula::DlogSimplified { p_g } => {
            let c = bound_dlog_simplified(*p_g)?;
            (c.bound, json!({"kappa": c.kappa}))
        }
    };
    Ok(Outcome {
        verdicts: vec![Verdict::new("evaluated", value.is_finite(), format!("{value:.12e}"))],
        result: json!({"formula": to_value(formula), "value": value, "extra": extra}),
        ..Default::default()
    })
}
