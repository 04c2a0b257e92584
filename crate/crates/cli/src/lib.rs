//! Command-line front end: instance files in, JSON or aligned text out.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use orlicz_core::conjugate::conjugate_table;
use orlicz_core::duality::{
    dual_functional_norm, luxemburg_norm_bruteforce, orlicz_norm_bruteforce, DualDensity,
};
use orlicz_core::gallery::{divergence_demo, DEFAULT_LADDER};
use orlicz_core::geometry::{
    classify_smooth_point_with, construct_support_functional_with, smoothness_gap_function_to,
    support_density_census, verify_support_functional_with, SelectionRule, SmoothnessSample,
};
use orlicz_core::norms::{
    delta2_check, luxemburg_norm, orlicz_amemiya_norm, theta, Delta2Samples, KSet,
    BISECTION_REL_TOL, EPS_EQ,
};
use orlicz_core::{acceptance, check_space_smoothness, parse_instance, Error, Instance, SimpleFunction};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Scales `ε_eq` for exploratory runs.
pub const TOL_ENV: &str = "MO_TOL_OVERRIDE";

#[derive(Parser, Debug)]
#[command(name = "orlicz", version, about = "Norms, duality and smoothness in Musielak-Orlicz spaces")]
struct Cli {
    /// Emit a JSON report instead of aligned text.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall time in the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Luxemburg,
    Orlicz,
    Amemiya,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    Uniform,
    Sequential,
    Reverse,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Luxemburg and Orlicz/Amemiya norms with the interval K(u).
    Norm {
        #[arg(long)]
        instance: PathBuf,
        /// Function name, or `all`.
        #[arg(long, default_value = "all")]
        function: String,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
    },
    /// Table of (v, Φ*(t, v)) at one atom.
    Conjugate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        atom: usize,
        /// Comma-separated v values.
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2,3")]
        v: Vec<f64>,
    },
    /// Norm of the functional given by a density and a singular mass.
    Dual {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        density: String,
        #[arg(long, default_value_t = 0.0)]
        singular: f64,
    },
    /// Brute-force norms by search over dual densities.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
    },
    /// Support functional at u, with its verification.
    Support {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long, value_enum, default_value_t = Rule::Uniform)]
        rule: Rule,
    },
    /// Whether u is a smooth point.
    SmoothPoint {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        function: String,
        /// Also count support densities by brute force at this resolution.
        #[arg(long)]
        census: Option<usize>,
    },
    /// Conditions (a)-(c) for smoothness of the whole space.
    SmoothSpace {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1e3)]
        horizon: f64,
    },
    /// Sampled Δ₂ check.
    Delta2 {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: f64,
        /// Function used as the threshold f (default 0).
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long, default_value_t = 1e3)]
        horizon: f64,
        #[arg(long, default_value_t = 400)]
        count: usize,
    },
    /// First subdifferential gap of size at least δ on each atom.
    Gap {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1e3)]
        horizon: f64,
    },
    /// Modulars of the variable-exponent examples along grid refinement.
    Gallery {
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<usize>>,
    },
    /// Runs the acceptance suite.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT };
        Failure { code, message: e.to_string() }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

/// Reads [`TOL_ENV`]: the `ε_eq` scale factor, 1 when unset.
fn tolerance_scale() -> Result<f64, Failure> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(1.0),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(input(format!("{TOL_ENV} must be a positive number, got {s:?}"))),
        },
    }
}

struct Outcome {
    results: Value,
    /// Exit code on success; `selftest` reports failed criteria here.
    code: i32,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn load(path: &Path, digest: &mut Sha256) -> Result<Instance, Failure> {
    let bytes = std::fs::read(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    digest.update(&bytes);
    Ok(parse_instance(path)?)
}

fn norm_report(inst: &Instance, u: &SimpleFunction, which: Which) -> Result<Value, Failure> {
    let mut m = serde_json::Map::new();
    if matches!(which, Which::Luxemburg | Which::All) {
        m.insert("luxemburg".into(), json!(luxemburg_norm(&inst.phi, &inst.space, u)?));
    }
    let (orl, kset) = orlicz_amemiya_norm(&inst.phi, &inst.space, u)?;
    if matches!(which, Which::Orlicz | Which::All) {
        m.insert("orlicz".into(), json!(orl));
    }
    if matches!(which, Which::Amemiya | Which::All) {
        m.insert("amemiya".into(), json!(orl));
    }
    match kset {
        Some(KSet::NonEmpty { k_star, k_double_star }) => {
            m.insert("k_star".into(), json!(k_star));
            m.insert("k_double_star".into(), json!(k_double_star));
            m.insert("degenerate".into(), json!(false));
        }
        Some(KSet::Degenerate { l1_value }) => {
            m.insert("k_star".into(), Value::Null);
            m.insert("k_double_star".into(), Value::Null);
            m.insert("degenerate".into(), json!(true));
            m.insert("l1_value".into(), json!(l1_value));
        }
        None => {}
    }
    m.insert("theta".into(), json!(theta(&inst.phi, &inst.space, u)?));
    Ok(Value::Object(m))
}

fn execute(cmd: &Command, digest: &mut Sha256, eps: f64) -> Result<Outcome, Failure> {
    let ok = |results| Ok(Outcome { results, code: EXIT_OK });
    match cmd {
        Command::Norm { instance, function, which } => {
            let inst = load(instance, digest)?;
            if function == "all" {
                let mut m = serde_json::Map::new();
                for (name, u) in &inst.functions {
                    m.insert(name.clone(), norm_report(&inst, u, *which)?);
                }
                ok(Value::Object(m))
            } else {
                ok(norm_report(&inst, inst.function(function)?, *which)?)
            }
        }
        Command::Conjugate { instance, atom, v } => {
            let inst = load(instance, digest)?;
            if *atom >= inst.space.len() {
                return Err(input(format!("--atom {atom} out of range (space has {} atoms)", inst.space.len())));
            }
            let site = inst.space.site(*atom);
            let table = conjugate_table(&inst.phi, site, v)?;
            ok(json!({
                "atom": atom,
                "t": site.t,
                "generator": inst.phi.name(),
                "conjugate": inst.phi.conjugate().name(),
                "table": table,
            }))
        }
        Command::Dual { instance, density, singular } => {
            let inst = load(instance, digest)?;
            let d = DualDensity::new(inst.function(density)?.clone(), *singular)?;
            let norm = dual_functional_norm(&inst.phi, &inst.space, &d)?;
            let modular = orlicz_core::modular(&inst.phi.conjugate(), &inst.space, &d.v)?;
            ok(json!({ "norm": norm, "conjugate_modular": modular, "s_norm": d.s_norm }))
        }
        Command::Oracle { instance, function, resolution } => {
            let inst = load(instance, digest)?;
            let u = inst.function(function)?;
            let brute = orlicz_norm_bruteforce(&inst.phi, &inst.space, u, *resolution)?;
            let (orl, _) = orlicz_amemiya_norm(&inst.phi, &inst.space, u)?;
            let lux_brute = luxemburg_norm_bruteforce(&inst.phi, &inst.space, u, *resolution)?;
            let lux = luxemburg_norm(&inst.phi, &inst.space, u)?;
            ok(json!({
                "resolution": resolution,
                "orlicz_bruteforce": brute,
                "orlicz_amemiya": orl,
                "orlicz_gap": (brute - orl).abs(),
                "luxemburg_bruteforce": lux_brute,
                "luxemburg": lux,
                "luxemburg_gap": (lux_brute - lux).abs(),
            }))
        }
        Command::Support { instance, function, rule } => {
            let inst = load(instance, digest)?;
            let u = inst.function(function)?;
            let rule = match rule {
                Rule::Uniform => SelectionRule::Uniform,
                Rule::Sequential => SelectionRule::Sequential,
                Rule::Reverse => SelectionRule::Reverse,
            };
            let sf = construct_support_functional_with(&inst.phi, &inst.space, u, rule)?;
            let check = verify_support_functional_with(&inst.phi, &inst.space, u, &sf.dual(), eps)?;
            ok(json!({ "support": to_value(&sf), "verify": to_value(&check) }))
        }
        Command::SmoothPoint { instance, function, census } => {
            let inst = load(instance, digest)?;
            let u = inst.function(function)?;
            let r = classify_smooth_point_with(&inst.phi, &inst.space, u, eps)?;
            let mut v = to_value(&r);
            if let Some(res) = census {
                let c = support_density_census(&inst.phi, &inst.space, u, *res)?;
                v["census"] = to_value(&c);
            }
            ok(v)
        }
        Command::SmoothSpace { instance, horizon } => {
            let inst = load(instance, digest)?;
            let sample = SmoothnessSample { horizon: *horizon, ..SmoothnessSample::default() };
            let r = check_space_smoothness(&inst.phi, &inst.space, &sample)?;
            let mut v = to_value(&r);
            v["failing"] = json!(r.failing());
            ok(v)
        }
        Command::Delta2 { instance, k, threshold, horizon, count } => {
            let inst = load(instance, digest)?;
            let f = match threshold {
                Some(name) => inst.function(name)?.clone(),
                None => SimpleFunction::zeros(inst.space.len()),
            };
            let samples = Delta2Samples { horizon: *horizon, count: *count, extra: vec![] };
            ok(to_value(&delta2_check(&inst.phi, &inst.space, *k, &f, &samples)?))
        }
        Command::Gap { instance, delta, horizon } => {
            let inst = load(instance, digest)?;
            ok(to_value(&smoothness_gap_function_to(&inst.phi, &inst.space, *delta, *horizon)?))
        }
        Command::Gallery { ladder } => {
            let ladder = ladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec());
            if ladder.contains(&0) {
                return Err(input("--ladder entries must be positive"));
            }
            ok(to_value(&divergence_demo(&ladder)?))
        }
        Command::Selftest { only } => {
            let outcomes = match only {
                Some(id) if (1..=12).contains(id) => vec![acceptance::run(*id)],
                Some(id) => return Err(input(format!("--only must be in 1..=12, got {id}"))),
                None => acceptance::run_all(),
            };
            let code = if outcomes.iter().all(|o| o.pass) { EXIT_OK } else { EXIT_FAILED };
            let lines: Vec<String> = outcomes.iter().map(ToString::to_string).collect();
            Ok(Outcome { results: json!({ "criteria": to_value(&outcomes), "lines": lines }), code })
        }
    }
}

/// Writes floats with 17 significant digits so that they round-trip.
struct Precise;

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

pub fn to_json(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise);
    v.serialize(&mut ser).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8 output")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        x => out.push((prefix.to_string(), scalar(x))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn to_text(report: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        let pad = width - k.chars().count();
        s.push_str(&format!("{k}{}  {v}\n", " ".repeat(pad)));
    }
    s
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code with the text for standard output and standard error.
pub fn run<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK { (code, text, String::new()) } else { (code, String::new(), text) };
        }
    };
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    let mut digest = Sha256::new();
    for a in &echo {
        digest.update(a.as_bytes());
        digest.update([0u8]);
    }
    let scale = match tolerance_scale() {
        Ok(x) => x,
        Err(f) => return (f.code, String::new(), format!("error: {}\n", f.message)),
    };
    let eps = EPS_EQ * scale;
    match execute(&cli.command, &mut digest, eps) {
        Ok(out) => {
            let mut tolerances = BTreeMap::new();
            tolerances.insert("eps_eq", eps);
            tolerances.insert("bisection_rel_tol", BISECTION_REL_TOL);
            let mut report = json!({
                "command": echo,
                "inputs_digest": hex::encode(digest.finalize()),
                "results": out.results,
                "tolerances": tolerances,
            });
            if cli.timing {
                report["wall_time_s"] = json!(start.elapsed().as_secs_f64());
            }
            let text = if cli.json { to_json(&report) + "\n" } else { to_text(&report) };
            (out.code, text, String::new())
        }
        Err(f) => (f.code, String::new(), format!("error: {}\n", f.message)),
    }
}
