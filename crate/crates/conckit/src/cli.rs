//! The `conckit` command line.
//!
//! Exit status: 0 success, 1 usage or parameter error, 2 a valid bound
//! request whose preconditions fail, 3 verification failures present.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use conckit_core::bounds::{self, CatalogError, Event, ParamValue, Params};
use conckit_core::dist::FiniteDist;
use conckit_core::math::harmonic;
use conckit_core::processes::{Objective, ProcessKind, ProcessSpec, Stake, Trace};
use conckit_core::BoundResult;
use serde::Serialize;
use thiserror::Error;

use crate::format::g12;
use crate::harness::{is_heavy, run_suite, traces, with_jobs};
use crate::model::Model;
use crate::report::{self, Format, Report};
use crate::suites::resolve_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_BOUND: i32 = 2;
pub const EXIT_VERIFY_FAIL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError::Usage(s)
    }
}

impl From<&str> for CliError {
    fn from(s: &str) -> Self {
        CliError::Usage(s.to_string())
    }
}

type Res<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "conckit", version, about = "Concentration bounds, exact distributions, process simulators and verification suites")]
pub struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output format: json, csv or markdown.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON object of flag values; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Evaluate a registered bound: `bound <id> --param value ...`.
    Bound(BoundArgs),
    /// Build an exact distribution and print its summary and tails.
    Dist(DistArgs),
    /// Simulate a process and write one CSV row per run.
    Simulate(SimArgs),
    /// Run a verification suite (default, ordering, processes, empty, or a JSON file).
    Verify(VerifyArgs),
    /// Re-emit a JSON report in another format.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    pub id: Option<String>,
    /// Print the catalog instead of evaluating.
    #[arg(long)]
    pub list: bool,
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
    pub params: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// binomial, poisson_binomial, hypergeom, geomsum, geometric, coupon
    pub family: String,
    #[arg(long)]
    pub n: Option<u64>,
    /// A probability or a comma-separated list.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long = "N")]
    pub big_n: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long = "tail-ge", value_delimiter = ',')]
    pub tail_ge: Vec<f64>,
    #[arg(long = "tail-le", value_delimiter = ',')]
    pub tail_le: Vec<f64>,
    /// Truncation budget for unbounded supports.
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    /// Include the whole pmf.
    #[arg(long)]
    pub pmf: bool,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// coupon, rls, oea, oea_mu, blind, cga_neutral, unbiased_search
    pub process: Option<String>,
    /// JSON process specification (fields of the `simulate` flags).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub objective: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub mu: Option<usize>,
    /// cGA population parameter K.
    #[arg(long = "K")]
    pub k: Option<u64>,
    /// none or binomial_half
    #[arg(long)]
    pub stake: Option<String>,
    #[arg(long = "checkpoint-every")]
    pub checkpoint_every: Option<u64>,
    /// Print the checkpoints of this single run instead of the run table.
    #[arg(long)]
    pub replay: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub name: Option<String>,
    #[arg(long)]
    pub suite: Option<String>,
    /// Also exit 3 on Monte-Carlo failures.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub input: PathBuf,
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(&args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = match apply_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let echo = echo_line(&args);
    let res = match &cli.cmd {
        Cmd::Bound(b) => cmd_bound(&cli, b, &echo, out),
        Cmd::Dist(d) => cmd_dist(&cli, d, &echo, out),
        Cmd::Simulate(s) => cmd_simulate(&cli, s, &echo, out, err),
        Cmd::Verify(v) => cmd_verify(&cli, v, &args, out, err),
        Cmd::Report(r) => cmd_report(&cli, r, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// The invocation as a shell-style line, minus options that cannot change
/// the results (`--jobs`, `--out`).
pub fn echo_args(args: &[String]) -> Vec<String> {
    let mut v = Vec::new();
    let mut skip = false;
    for (i, a) in args.iter().enumerate() {
        if skip {
            skip = false;
            continue;
        }
        if a == "--jobs" || a == "--out" {
            skip = true;
            continue;
        }
        if a.starts_with("--jobs=") || a.starts_with("--out=") {
            continue;
        }
        v.push(if i == 0 { "conckit".to_string() } else { a.clone() });
    }
    v
}

fn echo_line(args: &[String]) -> String {
    echo_args(args).join(" ")
}

// ---------------------------------------------------------------------------
// Config files

const POSITIONAL: [(&str, &str); 4] = [("bound", "id"), ("dist", "family"), ("simulate", "process"), ("verify", "name")];
const GLOBAL_FLAGS: [&str; 5] = ["seed", "jobs", "format", "out", "config"];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn flag_given(args: &[String], name: &str) -> bool {
    let long = format!("--{name}");
    let eq = format!("--{name}=");
    args.iter().any(|a| *a == long || a.starts_with(&eq))
}

fn json_value_text(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::Null => None,
        serde_json::Value::Bool(_) => None,
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Array(xs) => Some(xs.iter().filter_map(json_value_text).collect::<Vec<_>>().join(",")),
        serde_json::Value::Object(_) => Some(v.to_string()),
    }
}

/// Splices flag values from `--config` into the argument list. Global flags
/// go right after the program name, positional values right after the
/// subcommand, everything else at the end.
pub fn apply_config(args: &[String]) -> Result<Vec<String>, String> {
    let Some(path) = config_path(args) else {
        return Ok(args.to_vec());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{path}: line {}, column {}: {e}", e.line(), e.column()))?;
    let obj = v.as_object().ok_or_else(|| format!("{path}: expected a JSON object of flag values"))?;
    let mut args = args.to_vec();
    let sub_idx = args.iter().position(|a| POSITIONAL.iter().any(|(s, _)| s == a) || a == "report");
    let mut globals = Vec::new();
    let mut tail = Vec::new();
    for (k, val) in obj {
        if let Some(idx) = sub_idx {
            if let Some((_, pos)) = POSITIONAL.iter().find(|(s, _)| *s == args[idx]) {
                if k == pos {
                    let missing = args.get(idx + 1).is_none_or(|a| a.starts_with("--"));
                    if missing {
                        if let Some(t) = json_value_text(val) {
                            args.insert(idx + 1, t);
                        }
                    }
                    continue;
                }
            }
        }
        if k == "config" || flag_given(&args, k) {
            continue;
        }
        let dest = if GLOBAL_FLAGS.contains(&k.as_str()) { &mut globals } else { &mut tail };
        match val {
            serde_json::Value::Bool(true) => dest.push(format!("--{k}")),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            _ => {
                dest.push(format!("--{k}"));
                dest.push(json_value_text(val).unwrap_or_default());
            }
        }
    }
    let mut out = vec![args[0].clone()];
    out.extend(globals);
    out.extend(args[1..].iter().cloned());
    out.extend(tail);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Output helpers

fn format_of(cli: &Cli, default: Format) -> Res<Format> {
    match &cli.format {
        Some(f) => Ok(f.parse::<Format>()?),
        None => Ok(match cli.out.as_deref().and_then(Path::extension).and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some("md") => Format::Markdown,
            _ => default,
        }),
    }
}

fn emit_main(cli: &Cli, text: &str, out: &mut dyn Write) -> Res<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Res<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| e.to_string())?;
    s.push('\n');
    Ok(s)
}

fn describe_event(e: &Event) -> String {
    match e {
        Event::Ge { t } => format!("X >= {}", g12(*t)),
        Event::Gt { t } => format!("X > {}", g12(*t)),
        Event::Le { t } => format!("X <= {}", g12(*t)),
        Event::Lt { t } => format!("X < {}", g12(*t)),
        Event::Eq { k } => format!("X = {}", g12(*k)),
        Event::AbsDevGe { center, lambda } => format!("|X - {}| >= {}", g12(*center), g12(*lambda)),
        Event::PartialSums { lambda, upper } => {
            if *upper {
                format!("max_i (S_i - E[S_i]) >= {}", g12(*lambda))
            } else {
                format!("max_i (E[S_i] - S_i) >= {}", g12(*lambda))
            }
        }
        Event::Described { text } => text.clone(),
    }
}

// ---------------------------------------------------------------------------
// bound

/// `--key value` / `--key=value` pairs; global flags are pulled out.
fn parse_bound_params(tokens: &[String]) -> Res<(Params, Vec<(String, String)>)> {
    let mut p = Params::new();
    let mut globals = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        let Some(key) = t.strip_prefix("--") else {
            return Err(format!("unexpected argument `{t}`; parameters are given as --name value").into());
        };
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = tokens.get(i + 1).ok_or_else(|| format!("parameter --{key} needs a value"))?;
                i += 1;
                (key.to_string(), v.clone())
            }
        };
        i += 1;
        if GLOBAL_FLAGS.contains(&key.as_str()) {
            globals.push((key, value));
        } else {
            if p.0.contains_key(&key) {
                return Err(format!("parameter --{key} given twice").into());
            }
            p.insert(&key, ParamValue::parse(&value));
        }
    }
    Ok((p, globals))
}

#[derive(Serialize)]
struct BoundOutput<'a> {
    invocation: &'a str,
    #[serde(flatten)]
    result: &'a BoundResult,
}

fn cmd_bound(cli: &Cli, b: &BoundArgs, echo: &str, out: &mut dyn Write) -> Res<i32> {
    let (params, globals) = parse_bound_params(&b.params)?;
    let mut fmt = cli.format.clone();
    let mut out_path = cli.out.clone();
    for (k, v) in globals {
        match k.as_str() {
            "format" => fmt = Some(v),
            "out" => out_path = Some(PathBuf::from(v)),
            _ => {}
        }
    }
    let format = match fmt {
        Some(f) => Some(f.parse::<Format>()?),
        None => None,
    };
    let write = |text: &str, out: &mut dyn Write| -> Res<()> {
        match &out_path {
            Some(p) => std::fs::write(p, text)?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(())
    };
    if b.list {
        let text = match format {
            Some(Format::Json) => json(&bounds::catalog())?,
            _ => {
                let mut s = String::new();
                for info in bounds::catalog() {
                    s.push_str(&format!("{:<36} {}\n", info.id, info.summary));
                }
                s
            }
        };
        write(&text, out)?;
        return Ok(EXIT_OK);
    }
    let Some(id) = &b.id else {
        return Err("bound: give an id (see `conckit bound --list`)".into());
    };
    let r = match bounds::evaluate(id, &params) {
        Ok(r) => r,
        Err(e @ CatalogError::UnknownId { .. }) => return Err(e.to_string().into()),
        Err(e) => return Err(e.to_string().into()),
    };
    let text = match format {
        Some(Format::Json) => json(&BoundOutput { invocation: echo, result: &r })?,
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["bound_id", "value", "raw", "valid", "sense", "anchor"]).map_err(|e| e.to_string())?;
            w.write_record([
                r.bound_id.as_str(),
                &g12(r.value),
                &g12(r.raw),
                if r.valid { "true" } else { "false" },
                sense_name(r.sense),
                r.anchor.as_str(),
            ])
            .map_err(|e| e.to_string())?;
            String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?
        }
        _ => bound_text(echo, &r),
    };
    write(&text, out)?;
    Ok(if r.valid { EXIT_OK } else { EXIT_INVALID_BOUND })
}

fn sense_name(s: conckit_core::Sense) -> &'static str {
    match s {
        conckit_core::Sense::Upper => "upper",
        conckit_core::Sense::Lower => "lower",
    }
}

fn bound_text(echo: &str, r: &BoundResult) -> String {
    let mut s = format!("# {echo}\n");
    s.push_str(&format!("id: {}\n", r.bound_id));
    s.push_str(&format!("value: {}\n", g12(r.value)));
    if r.clamped {
        s.push_str(&format!("raw: {} (clamped)\n", g12(r.raw)));
    }
    s.push_str(&format!("valid: {}\n", r.valid));
    s.push_str(&format!("sense: {}\n", sense_name(r.sense)));
    s.push_str(&format!("anchor: {}\n", r.anchor));
    if let Some(e) = &r.event {
        s.push_str(&format!("event: {}\n", describe_event(e)));
    }
    for (k, v) in &r.extras {
        s.push_str(&format!("{k}: {}\n", g12(*v)));
    }
    for p in &r.violated_preconditions {
        s.push_str(&format!("violated: {p}\n"));
    }
    for n in &r.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    s
}

// ---------------------------------------------------------------------------
// dist

fn parse_list(s: &str) -> Res<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("`{t}` is not a number"))))
        .collect()
}

pub fn dist_model(d: &DistArgs) -> Res<Model> {
    let need_n = || d.n.ok_or_else(|| CliError::Usage(format!("{}: --n is required", d.family)));
    let need_p = || d.p.as_deref().ok_or_else(|| CliError::Usage(format!("{}: --p is required", d.family)));
    let m = match d.family.as_str() {
        "binomial" => {
            let p = parse_list(need_p()?)?;
            if p.len() != 1 {
                return Err("binomial: --p takes one probability".into());
            }
            Model::Binomial { n: need_n()?, p: p[0] }
        }
        "poisson_binomial" => {
            let mut p = parse_list(need_p()?)?;
            if let (Some(n), 1) = (d.n, p.len()) {
                p = vec![p[0]; n as usize];
            }
            Model::PoissonBinomial { p }
        }
        "hypergeom" => Model::Hypergeom {
            big_n: d.big_n.ok_or("hypergeom: --N is required")?,
            n: need_n()?,
            m: d.m.ok_or("hypergeom: --m is required")?,
        },
        "geomsum" | "geom_sum" | "geometric" => {
            let mut p = parse_list(need_p()?)?;
            if d.family == "geometric" && p.len() != 1 {
                return Err("geometric: --p takes one probability".into());
            }
            if let (Some(n), 1) = (d.n, p.len()) {
                p = vec![p[0]; n as usize];
            }
            Model::GeomSum { p }
        }
        "coupon" => Model::Coupon { n: need_n()? },
        f => return Err(format!("unknown family `{f}` (binomial, poisson_binomial, hypergeom, geomsum, geometric, coupon)").into()),
    };
    m.validate()?;
    Ok(m)
}

#[derive(Serialize)]
struct TailRow {
    event: String,
    t: f64,
    lo: f64,
    hi: f64,
}

#[derive(Serialize)]
struct DistOutput {
    invocation: String,
    model: Model,
    mean: f64,
    variance: f64,
    support_size: usize,
    min: f64,
    max: f64,
    tail_deficit: f64,
    tails: Vec<TailRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pmf: Option<Vec<(f64, f64)>>,
}

fn cmd_dist(cli: &Cli, d: &DistArgs, echo: &str, out: &mut dyn Write) -> Res<i32> {
    let model = dist_model(d)?;
    let dist: FiniteDist = match &model {
        Model::GeomSum { p } => conckit_core::dist::GeomSumSpec::new(p.clone())
            .and_then(|s| conckit_core::geom_sum_dist(&s, d.eps))
            .map_err(|e| e.to_string())?,
        Model::Coupon { n } => conckit_core::dist::GeomSumSpec::coupon(*n as usize)
            .and_then(|s| conckit_core::geom_sum_dist(&s, d.eps))
            .map_err(|e| e.to_string())?,
        m => m.exact()?,
    };
    // Closed forms where known; truncated sums would understate both.
    let (mean, variance) = match model.stats() {
        Some(st) => (st.mean, st.var),
        None => conckit_core::moments(&dist),
    };
    let mut tails = Vec::new();
    for &t in &d.tail_ge {
        let (lo, hi) = Event::Ge { t }.prob_interval(&dist).expect("single-variable event");
        tails.push(TailRow { event: "ge".into(), t, lo, hi });
    }
    for &t in &d.tail_le {
        let (lo, hi) = Event::Le { t }.prob_interval(&dist).expect("single-variable event");
        tails.push(TailRow { event: "le".into(), t, lo, hi });
    }
    let format = format_of(cli, Format::Markdown)?;
    let text = match format {
        Format::Json => json(&DistOutput {
            invocation: echo.to_string(),
            model: model.clone(),
            mean,
            variance,
            support_size: dist.len(),
            min: dist.min_value(),
            max: dist.max_value(),
            tail_deficit: dist.tail_deficit(),
            tails,
            pmf: d.pmf.then(|| dist.iter().collect()),
        })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["value", "pmf", "cdf"]).map_err(|e| e.to_string())?;
            for (v, m, c) in dist.csv_rows() {
                w.write_record([g12(v), g12(m), g12(c)]).map_err(|e| e.to_string())?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?
        }
        Format::Markdown => {
            let mut s = format!("# {echo}\n");
            s.push_str(&format!("model: {}\n", model.label()));
            s.push_str(&format!("mean: {}\n", g12(mean)));
            s.push_str(&format!("variance: {}\n", g12(variance)));
            s.push_str(&format!("support: {} points in [{}, {}]\n", dist.len(), g12(dist.min_value()), g12(dist.max_value())));
            if dist.tail_deficit() > 0.0 {
                s.push_str(&format!("tail_deficit: {}\n", g12(dist.tail_deficit())));
            }
            for r in &tails {
                let op = if r.event == "ge" { ">=" } else { "<=" };
                if r.hi > r.lo {
                    s.push_str(&format!("Pr[X {op} {}] = {} (at most {})\n", g12(r.t), g12(r.lo), g12(r.hi)));
                } else {
                    s.push_str(&format!("Pr[X {op} {}] = {}\n", g12(r.t), g12(r.lo)));
                }
            }
            if d.pmf {
                for (v, m) in dist.iter() {
                    s.push_str(&format!("{}\t{}\n", g12(v), g12(m)));
                }
            }
            s
        }
    };
    emit_main(cli, &text, out)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// simulate

/// A horizon that caps runtimes far above their expectation, where the
/// expectation is known to be moderate.
pub fn default_horizon(spec: &ProcessSpec) -> u64 {
    let n = spec.n.max(2) as f64;
    let e = std::f64::consts::E;
    match spec.kind {
        ProcessKind::Coupon => u64::MAX,
        ProcessKind::CgaNeutral => 100 * spec.k * spec.k,
        ProcessKind::Blind | ProcessKind::UnbiasedSearch => 64u64 << spec.n.min(40),
        _ if matches!(spec.objective, Objective::Needle) => (64.0 * n.powf(n)).min(1e15) as u64,
        ProcessKind::OeaMu => (100.0 * (spec.mu as f64 + e * n * (n.ln() + 1.0))).ceil() as u64,
        _ => (100.0 * e * n * (n.ln() + 1.0)).ceil() as u64,
    }
}

fn suggested_horizon(spec: &ProcessSpec) -> u64 {
    let mut s = spec.clone();
    s.n = s.n.min(24);
    default_horizon(&s)
}

pub fn sim_spec(cli: &Cli, s: &SimArgs) -> Res<ProcessSpec> {
    let seed = cli.seed.ok_or("simulate: --seed is required")?;
    let mut spec = match &s.spec {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let mut v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| format!("{}: line {}, column {}: {e}", p.display(), e.line(), e.column()))?;
            if let Some(o) = v.as_object_mut() {
                o.entry("seed").or_insert(seed.into());
                o.entry("horizon").or_insert(0.into());
            }
            serde_json::from_value::<ProcessSpec>(v).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => {
            let name = s.process.as_deref().ok_or("simulate: give a process name or --spec")?;
            let kind = match name {
                "cga" => ProcessKind::CgaNeutral,
                _ => ProcessKind::from_name(name).ok_or_else(|| {
                    format!(
                        "unknown process `{name}` ({})",
                        ProcessKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
                    )
                })?,
            };
            let objective = match &s.objective {
                Some(o) => Objective::parse(o).ok_or_else(|| format!("unknown objective `{o}`"))?,
                None => Objective::OneMax,
            };
            let n = match kind {
                ProcessKind::CgaNeutral => s.n.unwrap_or(1),
                _ => s.n.ok_or("simulate: --n is required")?,
            };
            let mut spec = ProcessSpec::new(kind, n, objective, 0, seed);
            spec.k = s.k.unwrap_or(0);
            spec.rate = s.rate;
            if let Some(mu) = s.mu {
                spec.mu = mu;
            }
            spec.stake = match s.stake.as_deref() {
                None | Some("none") => Stake::None,
                Some("binomial_half") => Stake::BinomialHalf,
                Some(x) => return Err(format!("unknown stake `{x}` (none, binomial_half)").into()),
            };
            spec
        }
    };
    spec.seed = seed;
    if let Some(h) = s.horizon {
        spec.horizon = h;
    }
    if let Some(c) = s.checkpoint_every {
        spec.checkpoint_every = c;
    }
    if spec.horizon == 0 {
        if is_heavy(&spec) {
            return Err(format!(
                "refusing to run {} on n={} without --horizon: the runtime can be astronomically large (suggested: --horizon {})",
                spec.kind.name(),
                spec.n,
                suggested_horizon(&spec)
            )
            .into());
        }
        spec.horizon = default_horizon(&spec);
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn quantile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let i = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[i]
}

fn trace_summary(echo: &str, spec: &ProcessSpec, trs: &[Trace]) -> String {
    let mut rt: Vec<u64> = trs.iter().map(|t| t.runtime).collect();
    rt.sort_unstable();
    let runs = trs.len() as f64;
    let censored = trs.iter().filter(|t| t.censored).count();
    let mean = rt.iter().map(|&x| x as f64).sum::<f64>() / runs;
    let var = rt.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (runs - 1.0).max(1.0);
    let mut s = format!("# {echo}\n");
    s.push_str(&format!("process: {} n={} objective={}\n", spec.kind.name(), spec.n, spec.objective.name()));
    if spec.horizon == u64::MAX {
        s.push_str(&format!("runs: {}\n", trs.len()));
    } else {
        s.push_str(&format!("runs: {} (censored at horizon {}: {censored})\n", trs.len(), spec.horizon));
    }
    s.push_str(&format!("mean: {}\n", g12(mean)));
    s.push_str(&format!("std_error: {}\n", g12((var / runs).sqrt())));
    for q in [0.1, 0.5, 0.9, 0.99] {
        s.push_str(&format!("q{}: {}\n", q, quantile(&rt, q)));
    }
    s.push_str(&format!("min: {}\nmax: {}\n", rt.first().unwrap_or(&0), rt.last().unwrap_or(&0)));
    match (spec.kind, spec.objective) {
        (ProcessKind::Oea, Objective::OneMax) if spec.rate.is_none() => {
            let n = spec.n as u64;
            s.push_str(&format!("fitness-level bound e*n*H_n: {}\n", g12(std::f64::consts::E * n as f64 * harmonic(n))));
        }
        (ProcessKind::Coupon, _) if spec.stake == Stake::None => {
            let n = spec.n as u64;
            s.push_str(&format!("expectation n*H_n: {}\n", g12(n as f64 * harmonic(n))));
        }
        _ => {}
    }
    s
}

fn cmd_simulate(cli: &Cli, s: &SimArgs, echo: &str, out: &mut dyn Write, err: &mut dyn Write) -> Res<i32> {
    let mut spec = sim_spec(cli, s)?;
    let jobs = cli.jobs.unwrap_or(0);
    if let Some(run) = s.replay {
        if spec.checkpoint_every == 0 {
            spec.checkpoint_every = 1;
        }
        let tr = conckit_core::processes::simulate_run(&spec, run).map_err(|e| e.to_string())?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["iteration", "best_fitness", "distance", "current_distance"]).map_err(|e| e.to_string())?;
        for c in &tr.checkpoints {
            w.write_record([c.iteration.to_string(), g12(c.best_fitness), c.distance.to_string(), c.current_distance.to_string()])
                .map_err(|e| e.to_string())?;
        }
        let text = String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        emit_main(cli, &text, out)?;
        writeln!(err, "# {echo}\nrun {run}: runtime {} censored {}", tr.runtime, tr.censored)?;
        return Ok(EXIT_OK);
    }
    if s.runs == 0 {
        return Err("simulate: --runs must be ≥ 1".into());
    }
    let trs = with_jobs(jobs, || traces(&spec, s.runs))??;
    let format = format_of(cli, Format::Csv)?;
    let summary = trace_summary(echo, &spec, &trs);
    let text = match format {
        Format::Json => json(&serde_json::json!({ "invocation": echo, "spec": spec, "runs": trs.iter().map(|t| serde_json::json!({"run_id": t.run, "runtime": t.runtime, "censored": t.censored})).collect::<Vec<_>>() }))?,
        Format::Markdown => summary.clone(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["run_id", "runtime", "censored"]).map_err(|e| e.to_string())?;
            for t in &trs {
                w.write_record([t.run.to_string(), t.runtime.to_string(), t.censored.to_string()]).map_err(|e| e.to_string())?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?
        }
    };
    emit_main(cli, &text, out)?;
    if format != Format::Markdown {
        if cli.out.is_some() {
            out.write_all(summary.as_bytes())?;
        } else {
            err.write_all(summary.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// verify / report

fn cmd_verify(cli: &Cli, v: &VerifyArgs, args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Res<i32> {
    let name = match (&v.name, &v.suite) {
        (Some(_), Some(_)) => return Err("verify: give the suite either positionally or with --suite".into()),
        (Some(n), None) | (None, Some(n)) => n.clone(),
        (None, None) => "default".into(),
    };
    let mut suite = resolve_suite(&name, cli.seed)?;
    if cli.seed.is_some() {
        suite.seed = cli.seed;
    }
    if suite.is_stochastic() && suite.seed.is_none() {
        return Err(format!("suite `{}` is stochastic; pass --seed", suite.name).into());
    }
    let invocation = echo_args(args);
    let report: Report = with_jobs(cli.jobs.unwrap_or(0), || run_suite(&suite, invocation))??;
    let line = report::summary_line(&report);
    match (&cli.out, &cli.format) {
        (Some(_), _) => {
            let text = report::emit(&report, format_of(cli, Format::Json)?)?;
            emit_main(cli, &text, out)?;
            writeln!(out, "{line}")?;
        }
        (None, Some(_)) => {
            let text = report::emit(&report, format_of(cli, Format::Json)?)?;
            out.write_all(text.as_bytes())?;
            writeln!(err, "{line}")?;
        }
        (None, None) => writeln!(out, "{line}")?,
    }
    for r in report.records.iter().filter(|r| r.verdict == crate::harness::Verdict::Fail).take(20) {
        writeln!(
            err,
            "FAIL {} {} bound={} oracle=[{}, {}] ({})",
            r.cell_id,
            r.bound_id,
            crate::format::opt_g12(r.bound),
            crate::format::opt_g12(r.oracle_lo),
            crate::format::opt_g12(r.oracle_hi),
            r.model
        )?;
    }
    let failed = report.summary.fail > 0 || (v.strict && report.summary.mc_fail > 0);
    Ok(if failed { EXIT_VERIFY_FAIL } else { EXIT_OK })
}

fn cmd_report(cli: &Cli, r: &ReportArgs, out: &mut dyn Write) -> Res<i32> {
    let text = std::fs::read_to_string(&r.input).map_err(|e| format!("{}: {e}", r.input.display()))?;
    let rep = report::from_json(&text).map_err(|e| format!("{}: {e}", r.input.display()))?;
    let text = report::emit(&rep, format_of(cli, Format::Markdown)?)?;
    emit_main(cli, &text, out)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(line: &str) -> (i32, String, String) {
        let args: Vec<String> = std::iter::once("conckit").chain(line.split_whitespace()).map(String::from).collect();
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(&args, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn bound_lin2() {
        let (code, out, _) = run_str("bound chernoff.mult.upper.lin2 --mu 10 --delta 1");
        assert_eq!(code, 0);
        assert!(out.contains("value: 0.0356739933473"), "{out}");
    }

    #[test]
    fn bound_errors() {
        let (code, _, err) = run_str("bound chernoff.mult.upper.lin3 --mu 10 --delta 1");
        assert_eq!(code, 1);
        assert!(err.contains("chernoff.mult.upper.lin2"), "{err}");
        assert_eq!(run_str("bound markov --mu 1 --t 10 --bogus 3").0, 1);
        assert_eq!(run_str("bound markov --mu 1 --t -1").0, 2);
    }

    #[test]
    fn echo_drops_jobs_and_out() {
        let a: Vec<String> = ["x", "verify", "--jobs", "4", "--out=r.json", "--seed", "1"].map(String::from).to_vec();
        assert_eq!(echo_args(&a), ["conckit", "verify", "--seed", "1"]);
    }

    #[test]
    fn quantiles() {
        let v = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
        assert_eq!(quantile(&v, 0.5), 5);
        assert_eq!(quantile(&v, 0.99), 10);
        assert_eq!(quantile(&v, 0.1), 1);
    }
}
