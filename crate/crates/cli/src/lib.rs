//! The `dwork` command line: point counts, hypergeometric values and sweeps.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid instance or parameters,
//! 3 methods disagree.

pub mod cache;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::Value;

use dwork_core::dwork::DworkError;
use dwork_core::engine::working_precision;
use dwork_core::hyperfun::{eval_f, eval_g, FParams, GParams, HyperError};
use dwork_core::oracle::sweep_instances;
use dwork_core::rational::Frac;
use dwork_core::residue::big_pow;
use dwork_core::{
    brute_count, sweep_verify, CountValue, DworkInstance, Engine, LambdaPolicy, Method, PadicContext, PadicGamma,
    PrecisionPolicy, Residue,
};

use report::{big_to_json, InstanceReport, PadicView};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dwork", version, about = "Point counts on Dwork hypersurfaces via p-adic hypergeometric functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count F_p-points of x_1^n + ... + x_n^n - n lambda x_1...x_n = 0 in P^{n-1}.
    Count(CountArgs),
    /// Evaluate the p-adic hypergeometric function G[a; b | x].
    Gfun(HyperArgs),
    /// Evaluate the finite-field hypergeometric function F(A; B | x), A_i = w^(-a_i (p-1)).
    Ffun(HyperArgs),
    /// Compare every method with exhaustive counting over a grid of instances.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Main,
    Koblitz,
    Relprime,
    Ff,
    Oracle,
    All,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u64,
    /// Reduced modulo p; negative values are accepted.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: i64,
    #[arg(long, value_enum, default_value = "main")]
    pub method: MethodArg,
    /// Use the character generator w^(-alpha) in the ff and koblitz formulas.
    #[arg(long, default_value_t = 1)]
    pub generator: u64,
    /// Compute counts only modulo p^K.
    #[arg(long, value_name = "K")]
    pub precision_override: Option<u32>,
    #[arg(long)]
    pub json: bool,
    /// Record per-method wall-clock times.
    #[arg(long)]
    pub timings: bool,
    /// Gamma cache directory (default: $DWORK_CACHE_DIR, else no cache).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    #[arg(long)]
    pub p: u64,
    /// Comma-separated rationals, e.g. "1/4,3/4".
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    /// Reduced modulo p.
    #[arg(long, allow_hyphen_values = true)]
    pub x: i64,
    /// p-adic digits to compute with.
    #[arg(long, default_value_t = 8)]
    pub precision: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub pmax: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub n_set: Vec<u64>,
    /// all (F_p, including 0), nonzero (F_p^*), or sample:K.
    #[arg(long, default_value = "all")]
    pub lambda: String,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// One JSON report per line.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub timings: bool,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<DworkError> for CliError {
    fn from(e: DworkError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<HyperError> for CliError {
    fn from(e: HyperError) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match run(&cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Count(a) => cmd_count(a, out, err),
        Command::Gfun(a) => cmd_hyper(a, false, out),
        Command::Ffun(a) => cmd_hyper(a, true, out),
        Command::Verify(a) => cmd_verify(a, out, err),
    }
}

fn emit(out: &mut dyn Write, text: &str) {
    let _ = writeln!(out, "{text}");
}

fn load_cache(engine: &Engine, dir: Option<&Path>, keys: &[(u64, u32)], err: &mut dyn Write) {
    if let Some(dir) = dir {
        for &(p, k) in keys {
            cache::load(engine, dir, p, k, err);
        }
    }
}

fn store_cache(engine: &Engine, dir: Option<&Path>, keys: &[(u64, u32)], err: &mut dyn Write) {
    if let Some(dir) = dir {
        for &(p, k) in keys {
            if let Err(e) = cache::store(engine, dir, p, k) {
                let _ = writeln!(err, "warning: could not write gamma cache for p={p}, K_w={k}: {e}");
            }
        }
    }
}

pub fn cmd_count(a: &CountArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let inst = DworkInstance::new(a.p, a.n, a.lambda)?;
    let policy = PrecisionPolicy { extra_digits: 0, override_target: a.precision_override };
    let (with_oracle, methods): (bool, Vec<Method>) = match a.method {
        MethodArg::Oracle => (true, vec![]),
        MethodArg::All => (true, Method::ALL.into_iter().filter(|m| m.applies(&inst)).collect()),
        MethodArg::Main if inst.lambda() == 0 => {
            let _ = writeln!(err, "note: lambda = 0 is outside the main formula; using the koblitz method");
            (false, vec![Method::Koblitz])
        }
        MethodArg::Main => (false, vec![Method::Main]),
        MethodArg::Koblitz => (false, vec![Method::Koblitz]),
        MethodArg::Relprime => (false, vec![Method::Relprime]),
        MethodArg::Ff => (false, vec![Method::Ff]),
    };
    let cache_dir = cache::resolve_dir(a.cache_dir.as_deref());
    let engine = Engine::new();
    let mut keys: Vec<(u64, u32)> = methods.iter().map(|&m| (a.p, working_precision(&inst, m, policy))).collect();
    keys.sort_unstable();
    keys.dedup();
    load_cache(&engine, cache_dir.as_deref(), &keys, err);

    let modulus = a.precision_override.map(|k| big_pow(a.p, k));
    let mut values: BTreeMap<String, Value> = BTreeMap::new();
    let mut timings = BTreeMap::new();
    let mut seen: Vec<BigUint> = Vec::new();
    if with_oracle {
        let start = Instant::now();
        let mut v = BigUint::from(brute_count(a.p, a.n, a.lambda));
        timings.insert("oracle".to_string(), start.elapsed().as_secs_f64() * 1e3);
        if let Some(m) = &modulus {
            v %= m;
        }
        values.insert("oracle".to_string(), big_to_json(&v));
        seen.push(v);
    }
    for &m in &methods {
        let start = Instant::now();
        let c = engine.count_with_generator(&inst, m, a.generator, policy)?;
        timings.insert(m.name().to_string(), start.elapsed().as_secs_f64() * 1e3);
        let v = match c.value {
            CountValue::Exact(v) => v,
            CountValue::Modular { residue, .. } => residue,
        };
        values.insert(m.name().to_string(), big_to_json(&v));
        seen.push(v);
    }
    store_cache(&engine, cache_dir.as_deref(), &keys, err);

    let agreement = seen.windows(2).all(|w| w[0] == w[1]);
    let report = InstanceReport {
        p: inst.p(),
        n: inst.n(),
        lambda: inst.lambda(),
        d: inst.d(),
        methods: values,
        agreement,
        timings_ms: if a.timings { timings } else { BTreeMap::new() },
        modulus: a.precision_override.map(|k| format!("{}^{k}", a.p)),
        errors: BTreeMap::new(),
    };
    emit(out, &if a.json { report.to_json() } else { report.to_text() });
    Ok(if agreement { EXIT_OK } else { EXIT_DISAGREE })
}

/// Parses `"1/4, 3/4"` into rationals; the empty string is the empty list.
pub fn parse_fracs(s: &str) -> Result<Vec<Frac>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let v: Frac = t.parse().map_err(|_| CliError::Usage(format!("cannot parse {t:?} as a rational")))?;
            Ok(v)
        })
        .collect()
}

#[derive(Serialize)]
struct HyperReport<'a> {
    function: &'a str,
    a: Vec<String>,
    b: Vec<String>,
    x: u64,
    #[serde(flatten)]
    value: PadicView,
}

fn hyper_value<R: Residue>(
    ctx: PadicContext<R>,
    params: &GParams,
    x: u64,
    finite_field: bool,
) -> Result<PadicView, CliError> {
    let gamma = PadicGamma::new(Arc::new(ctx));
    let v = if finite_field {
        let f = FParams::from_gparams(params, gamma.ctx().p()).ok_or_else(|| {
            CliError::Domain("every parameter times p - 1 must be an integer to define a character".to_string())
        })?;
        eval_f(&gamma, &f, x)?
    } else {
        eval_g(&gamma, params, x)?
    };
    Ok(PadicView::new(gamma.ctx(), &v))
}

pub fn cmd_hyper(a: &HyperArgs, finite_field: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = GParams::new(parse_fracs(&a.a)?, parse_fracs(&a.b)?)?;
    if a.precision == 0 {
        return Err(CliError::Usage("precision must be at least 1".to_string()));
    }
    let p = a.p;
    let x = a.x.rem_euclid(p.max(1) as i64) as u64;
    let bad = |e: dwork_core::PadicError| CliError::Domain(e.to_string());
    let view = if PadicContext::<u64>::fits(p, a.precision) {
        hyper_value(PadicContext::<u64>::new(p, a.precision).map_err(bad)?, &params, x, finite_field)?
    } else {
        hyper_value(PadicContext::<BigUint>::new(p, a.precision).map_err(bad)?, &params, x, finite_field)?
    };
    if a.json {
        let r = HyperReport {
            function: if finite_field { "F" } else { "G" },
            a: params.a().iter().map(ToString::to_string).collect(),
            b: params.b().iter().map(ToString::to_string).collect(),
            x,
            value: view,
        };
        emit(out, &serde_json::to_string(&r).expect("reports serialize"));
    } else {
        let _ = write!(out, "{}", view.to_text());
    }
    Ok(EXIT_OK)
}

pub fn parse_lambda_policy(s: &str) -> Result<LambdaPolicy, CliError> {
    match s {
        "all" => Ok(LambdaPolicy::All),
        "nonzero" => Ok(LambdaPolicy::Nonzero),
        _ => s
            .strip_prefix("sample:")
            .and_then(|k| k.parse::<u64>().ok())
            .filter(|&k| k > 0)
            .map(LambdaPolicy::Sample)
            .ok_or_else(|| CliError::Usage(format!("--lambda must be all, nonzero or sample:K, not {s:?}"))),
    }
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let lambdas = parse_lambda_policy(&a.lambda)?;
    if let Some(&n) = a.n_set.iter().find(|&&n| n < 2) {
        return Err(CliError::Domain(format!("n = {n} must be at least 2")));
    }
    let engine = Engine::new();
    let cache_dir = cache::resolve_dir(a.cache_dir.as_deref());
    let mut keys: Vec<(u64, u32)> = Vec::new();
    if cache_dir.is_some() {
        for inst in sweep_instances(a.pmax, &a.n_set, lambdas)? {
            for m in Method::ALL.into_iter().filter(|m| m.applies(&inst)) {
                keys.push((inst.p(), working_precision(&inst, m, PrecisionPolicy::default())));
            }
        }
        keys.sort_unstable();
        keys.dedup();
    }
    load_cache(&engine, cache_dir.as_deref(), &keys, err);
    let reports = sweep_verify(&engine, a.pmax, &a.n_set, lambdas, a.jobs)?;
    store_cache(&engine, cache_dir.as_deref(), &keys, err);

    let disagreements = reports.iter().filter(|r| !r.agreement).count();
    for r in &reports {
        let r = InstanceReport::from_core(r, a.timings);
        emit(out, &if a.json { r.to_json() } else { r.to_text() });
    }
    if !a.json {
        emit(out, &format!("{} instances, {} disagreements", reports.len(), disagreements));
    }
    Ok(if disagreements == 0 { EXIT_OK } else { EXIT_DISAGREE })
}
