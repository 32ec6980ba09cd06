use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use entrate_core::engine::{entropy_rate, terms_for_accuracy, EntropyEstimate};
use entrate_core::estimator::{estimate_entropy_from_sequence, EmOptions, HmmParams};
use entrate_core::gilbert::{capacity_bounds, FlipMapping, GilbertChannel};
use entrate_core::model::sample_sequence;
use entrate_core::oracle::{check_size, OracleOptions};
use entrate_core::validate::validate;
use entrate_core::{InitialDistribution, LogBase};
use serde_json::{json, Value};

use crate::config::{self, parse_log_base};
use crate::error::{CliError, CliResult};
use crate::report::digest;
use crate::sequence;
use crate::threads::{parallel_block_entropies, thread_cap};

/// What a command produced, before it is wrapped into a report.
#[derive(Debug, Clone)]
pub struct Output {
    pub result: Value,
    pub text: String,
    pub exit_code: u8,
    pub input_digest: String,
}

impl Output {
    fn ok(result: Value, text: String, input_digest: String) -> Self {
        Self {
            result,
            text,
            exit_code: 0,
            input_digest,
        }
    }
}

fn base_name(base: LogBase) -> &'static str {
    match base {
        LogBase::Bits => "bits",
        LogBase::Nats => "nats",
    }
}

fn row(text: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(text, "{key:<22}{value}");
}

pub fn run_validate(path: &Path) -> CliResult<Output> {
    let (cfg, bytes) = config::load(path)?;
    let report = validate(&cfg.transition, &cfg.epsilon);
    let mut violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| json!({ "condition": v.condition.label(), "message": v.message }))
        .collect();
    if let Err(e) = cfg.log_base() {
        violations.push(json!({ "condition": "config", "message": e.to_string() }));
    }
    let valid = violations.is_empty();

    let mut text = String::new();
    row(&mut text, "valid", valid);
    if let Some(g) = report.gamma {
        row(&mut text, "gamma", g);
    }
    if let Some(tau) = &report.stationary {
        row(&mut text, "stationary", format!("{tau:?}"));
    }
    for v in &violations {
        let _ = writeln!(text, "violation [{}]: {}", v["condition"].as_str().unwrap_or(""), v["message"].as_str().unwrap_or(""));
    }
    let result = json!({
        "valid": valid,
        "violations": violations,
        "gamma": report.gamma,
        "stationary": report.stationary,
    });
    Ok(Output {
        result,
        text,
        exit_code: if valid { 0 } else { 2 },
        input_digest: digest(&bytes),
    })
}

fn estimate_json(est: &EntropyEstimate, base: LogBase) -> Value {
    json!({
        "value": est.value_in(base),
        "log_base": base_name(base),
        "terms": est.terms,
        "gamma": est.gamma,
        "bound_constant": est.bound_constant,
        "err_bound": est.err_bound_in(base),
        "certified": est.certified,
        "phi_hat": est.phi_hat,
        "residual": est.residual,
        "normalization": est.normalization,
        "fixed_point_converged": est.fixed_point_converged,
    })
}

fn estimate_text(text: &mut String, est: &EntropyEstimate, base: LogBase) {
    row(text, "entropy rate", format!("{} {}", est.value_in(base), base_name(base)));
    row(text, "error bound", format!("{:e}", est.err_bound_in(base)));
    row(text, "terms", est.terms);
    row(text, "gamma", est.gamma);
    row(text, "bound constant", est.bound_constant);
    row(text, "phi_hat", format!("{:?}", est.phi_hat));
    row(text, "residual", format!("{:e}", est.residual));
}

pub fn run_entropy(
    path: &Path,
    terms: Option<usize>,
    accuracy: Option<f64>,
    log_base: Option<&str>,
) -> CliResult<Output> {
    let (cfg, bytes) = config::load(path)?;
    let model = cfg.model()?;
    let base = match log_base {
        Some(s) => parse_log_base(s)?,
        None => cfg.log_base()?,
    };
    let start = Instant::now();
    let n = match (terms, accuracy) {
        (Some(n), None) => n,
        (None, Some(delta)) => terms_for_accuracy(&model, base_to_bits(delta, base))?,
        (None, None) => DEFAULT_TERMS,
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid("--terms and --accuracy are mutually exclusive".into()))
        }
    };
    let est = entropy_rate(&model, n)?;
    let elapsed = start.elapsed().as_secs_f64();
    if !est.certified {
        return Err(CliError::Numerical(format!(
            "contraction factor gamma = {} is not below 1; no certified error bound",
            est.gamma
        )));
    }
    let mut result = estimate_json(&est, base);
    result["compute_seconds"] = json!(elapsed);
    let mut text = String::new();
    estimate_text(&mut text, &est, base);
    row(&mut text, "time (s)", elapsed);
    Ok(Output::ok(result, text, digest(&bytes)))
}

/// Default truncation depth for `entropy`.
pub const DEFAULT_TERMS: usize = 50;

// --accuracy is given in the output unit
fn base_to_bits(delta: f64, base: LogBase) -> f64 {
    delta / base.from_bits(1.0)
}

pub fn run_oracle(
    path: &Path,
    length: usize,
    initial: InitialDistribution,
    max_length: usize,
) -> CliResult<Output> {
    let (cfg, bytes) = config::load(path)?;
    let model = cfg.model()?;
    let base = cfg.log_base()?;
    let opts = OracleOptions { initial, max_length };
    check_size(model.q(), length, &opts)?;
    let workers = thread_cap()?;

    let mut rows = Vec::with_capacity(length);
    let mut text = String::new();
    let _ = writeln!(text, "{:>3}  {:<20}  {:<20}  {}", "n", "S_n", "G_n", "time (s)");
    for n in 1..=length {
        let start = Instant::now();
        let trace = parallel_block_entropies(&model, n, &opts, workers)?;
        let secs = start.elapsed().as_secs_f64();
        let s = base.from_bits(trace.joint(n));
        let g = (n >= 2).then(|| base.from_bits(trace.conditional(n)));
        let _ = writeln!(
            text,
            "{n:>3}  {:<20}  {:<20}  {secs:.6}",
            s,
            g.map_or_else(|| "-".to_string(), |g| g.to_string())
        );
        rows.push(json!({ "n": n, "joint": s, "conditional": g, "seconds": secs }));
    }
    let result = json!({
        "log_base": base_name(base),
        "initial": initial_name(initial),
        "threads": workers,
        "rows": rows,
    });
    Ok(Output::ok(result, text, digest(&bytes)))
}

fn initial_name(initial: InitialDistribution) -> &'static str {
    match initial {
        InitialDistribution::Stationary => "stationary",
        InitialDistribution::Uniform => "uniform",
    }
}

pub fn run_generate(
    path: &Path,
    length: usize,
    seed: u64,
    out: &Path,
    with_states: bool,
    initial: InitialDistribution,
) -> CliResult<Output> {
    let (cfg, bytes) = config::load(path)?;
    let model = cfg.model()?;
    let seq = sample_sequence(&model, length, seed, initial)?;
    let rendered = sequence::render(&seq, with_states);
    std::fs::write(out, &rendered)
        .map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    let zeros = seq.symbols().iter().filter(|&&s| s == 0).count();
    let result = json!({
        "out": out.display().to_string(),
        "length": length,
        "seed": seed,
        "initial": initial_name(initial),
        "with_states": with_states,
        "zero_fraction": zeros as f64 / length as f64,
        "output_digest": digest(rendered.as_bytes()),
    });
    let mut text = String::new();
    row(&mut text, "wrote", out.display());
    row(&mut text, "symbols", length);
    row(&mut text, "seed", seed);
    Ok(Output::ok(result, text, digest(&bytes)))
}

#[derive(Debug, Clone)]
pub struct EstimateArgs {
    pub sequence: PathBuf,
    pub q: Option<usize>,
    pub max_iters: usize,
    pub tol: f64,
    pub seed_init: u64,
    pub terms: usize,
}

pub fn run_estimate(args: &EstimateArgs) -> CliResult<Output> {
    let (raw, bytes) = sequence::load(&args.sequence)?;
    let q = args.q.unwrap_or_else(|| raw.inferred_q());
    if q < 2 {
        return Err(CliError::Invalid(format!("--q must be at least 2, got {q}")));
    }
    if !(args.tol > 0.0) {
        return Err(CliError::Invalid(format!("--tol must be positive, got {}", args.tol)));
    }
    let obs = raw.into_observations(q)?;
    let theta0 = HmmParams::seeded_guess(q, args.seed_init);
    let opts = EmOptions {
        max_iters: args.max_iters,
        tol: args.tol,
        ..Default::default()
    };
    let fit = estimate_entropy_from_sequence(obs.symbols(), &theta0, &opts, args.terms)?;
    let em = &fit.em;
    let result = json!({
        "q": q,
        "length": obs.len(),
        "em": {
            "transition": em.params.transition.to_rows(),
            "epsilon": em.params.epsilon,
            "loglik_trace": em.loglik_trace,
            "iterations": em.iterations,
            "converged": em.converged,
        },
        "entropy": estimate_json(&fit.entropy, LogBase::Bits),
        "violation": fit.violation.as_ref().map(ToString::to_string),
    });
    let mut text = String::new();
    row(&mut text, "symbols", obs.len());
    row(&mut text, "iterations", em.iterations);
    row(&mut text, "converged", em.converged);
    row(&mut text, "log2-likelihood", em.loglik_trace.last().copied().unwrap_or(f64::NAN));
    for (i, r) in em.params.transition.to_rows().iter().enumerate() {
        row(&mut text, &format!("transition[{i}]"), format!("{r:?}"));
    }
    row(&mut text, "epsilon", format!("{:?}", em.params.epsilon));
    estimate_text(&mut text, &fit.entropy, LogBase::Bits);
    if let Some(v) = &fit.violation {
        let _ = writeln!(text, "warning: fitted model has no certified bound: {v}");
    }
    Ok(Output::ok(result, text, digest(&bytes)))
}

pub fn run_gilbert(p: f64, q: f64, h: f64, terms: usize, mapping: FlipMapping) -> CliResult<Output> {
    let channel = GilbertChannel::new(p, q, h, terms)?.with_mapping(mapping);
    let b = capacity_bounds(&channel)?;
    let mapping_name = match mapping {
        FlipMapping::Direct => "direct",
        FlipMapping::Complement => "complement",
    };
    let params = json!({ "P": p, "Q": q, "h": h, "terms": terms, "mapping": mapping_name });
    let result = json!({
        "parameters": params,
        "lower": b.lower,
        "upper": b.upper,
        "corrected_lower": b.corrected_lower,
        "corrected_upper": b.corrected_upper,
        "entropy": b.entropy_hn(),
        "err_bound": b.err_bound(),
        "width": b.upper - b.lower,
        "gamma": b.entropy.gamma,
        "bound_constant": b.entropy.bound_constant,
        "terms": terms,
    });
    let mut text = String::new();
    row(&mut text, "lower (1+H)", b.lower);
    row(&mut text, "upper (1+H)", b.upper);
    row(&mut text, "lower (1-H)", b.corrected_lower);
    row(&mut text, "upper (1-H)", b.corrected_upper);
    row(&mut text, "H_N", b.entropy_hn());
    row(&mut text, "error bound", format!("{:e}", b.err_bound()));
    row(&mut text, "gamma", b.entropy.gamma);
    row(&mut text, "bound constant", b.entropy.bound_constant);
    row(&mut text, "terms", terms);
    Ok(Output::ok(result, text, digest(params.to_string().as_bytes())))
}
