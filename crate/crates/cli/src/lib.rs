//! `bratu` command-line front end.
//!
//! Exit codes: 0 success, 2 numerical failure, 3 usage or config error.

pub mod config;
pub mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use bratu_core::analytic::{find_alpha_bar, inner_product_closed_form, lambda_of_alpha, ustar_of_alpha};
use bratu_core::continuation::{
    locate_critical_points, trace_to_first_bifurcation, BranchPoint, BranchTracer, ContinuationConfig,
    CriticalPoint,
};
use bratu_core::scan::{alpha_grid, scan_on_grid, ScanForm, DEFAULT_STEPS, LEGENDRE_ALPHA_CAP};
use bratu_core::{BratuError, Grid, Scheme};

use config::{parse_n_list, usage, ConfigFile, UsageError};
use output::{csv, num, sidecar, write_json, write_text};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Default u* cap when tracing until the first bifurcation.
pub const DEFAULT_SEARCH_CAP: f64 = 200.0;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "bratu", version, about = "Continuation and bifurcation analysis of the 1D Bratu problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace the solution branch from (0, 0) and write it as CSV.
    Branch(TraceArgs),
    /// Locate and classify critical points along the branch (JSON).
    Critical(TraceArgs),
    /// First bifurcation point for each N (CSV).
    Table(TableArgs),
    /// Sample the closed-form branch (CSV); optionally print the fold.
    Analytic(AnalyticArgs),
    /// Sweep alpha for kernels of the linearized operator.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Fd,
    Fe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Original,
    Legendre,
    OriginalExact,
}

impl std::str::FromStr for SchemeArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

impl std::str::FromStr for FormArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ContinuationArgs {
    /// Key = value config file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Gauss points per element for the finite-element scheme.
    #[arg(long)]
    pub fe_quad: Option<usize>,
    /// Initial arclength step.
    #[arg(long)]
    pub ds: Option<f64>,
    #[arg(long)]
    pub ds_min: Option<f64>,
    #[arg(long)]
    pub ds_max: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub newton_tol: Option<f64>,
    #[arg(long)]
    pub newton_max_iters: Option<usize>,
    #[arg(long)]
    pub critical_bisection_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: ContinuationArgs,
    /// Number of elements.
    #[arg(long)]
    pub n: Option<usize>,
    /// Stop once u* reaches this value. Without it, `branch` stops at
    /// u* = 10 and `critical` at the first bifurcation (or u* = 200).
    #[arg(long)]
    pub target_ustar: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: ContinuationArgs,
    /// Comma-separated element counts.
    #[arg(long)]
    pub n_list: Option<String>,
    /// Give up on an N once u* exceeds this.
    #[arg(long)]
    pub max_ustar: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AnalyticArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Print the limit point and the inner product as JSON.
    #[arg(long)]
    pub critical: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub form: Option<FormArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    Numerical(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o error: {e}"))
    }
}

impl From<BratuError> for CliError {
    fn from(e: BratuError) -> Self {
        match e {
            BratuError::InvalidConfig(m) | BratuError::Domain(m) => CliError::Usage(usage(m)),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Branch(a) => cmd_branch(a),
        Command::Critical(a) => cmd_critical(a),
        Command::Table(a) => cmd_table(a),
        Command::Analytic(a) => cmd_analytic(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("error: {e}");
            EXIT_NUMERICAL
        }
    }
}

const CONTINUATION_KEYS: &[&str] = &[
    "scheme",
    "fe_quad",
    "ds",
    "ds_min",
    "ds_max",
    "theta",
    "newton_tol",
    "newton_max_iters",
    "critical_bisection_tol",
    "out",
];

/// Continuation settings after merging flags, config file and defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scheme: Scheme,
    pub config: ContinuationConfig,
    pub out: Option<PathBuf>,
    pub file: ConfigFile,
}

fn resolve_common(a: &ContinuationArgs, extra_keys: &[&str]) -> Result<Resolved, UsageError> {
    let file = ConfigFile::load(a.config.as_deref())?;
    let allowed: Vec<&str> = CONTINUATION_KEYS.iter().chain(extra_keys).copied().collect();
    file.check_keys(&allowed)?;
    let scheme = match file.pick("scheme", a.scheme)?.unwrap_or(SchemeArg::Fd) {
        SchemeArg::Fd => Scheme::finite_difference(),
        SchemeArg::Fe => {
            let q = file.pick("fe_quad", a.fe_quad)?.unwrap_or(3);
            Scheme::finite_element(q).map_err(|e| usage(e.to_string()))?
        }
    };
    let d = ContinuationConfig::default();
    let config = ContinuationConfig {
        ds_initial: file.pick("ds", a.ds)?.unwrap_or(d.ds_initial),
        ds_min: file.pick("ds_min", a.ds_min)?.unwrap_or(d.ds_min),
        ds_max: file.pick("ds_max", a.ds_max)?.unwrap_or(d.ds_max),
        theta: file.pick("theta", a.theta)?.unwrap_or(d.theta),
        newton_tol: file.pick("newton_tol", a.newton_tol)?.unwrap_or(d.newton_tol),
        newton_max_iters: file.pick("newton_max_iters", a.newton_max_iters)?.unwrap_or(d.newton_max_iters),
        critical_bisection_tol: file
            .pick("critical_bisection_tol", a.critical_bisection_tol)?
            .unwrap_or(d.critical_bisection_tol),
        ..d
    };
    let out = file.pick::<PathBuf>("out", a.out.clone())?;
    Ok(Resolved {
        scheme,
        config,
        out,
        file,
    })
}

fn element_count(file: &ConfigFile, flag: Option<usize>) -> Result<usize, UsageError> {
    let n = file.pick("n", flag)?.ok_or_else(|| usage("--n is required"))?;
    if n < 2 {
        return Err(usage(format!("need at least 2 elements, got {n}")));
    }
    Ok(n)
}

fn scheme_meta(scheme: &Scheme) -> Value {
    json!({
        "name": scheme.name(),
        "fe_quadrature_points": (scheme.name() == "fe").then_some(scheme.fe_quadrature_points),
    })
}

fn base_meta(command: &str, file: &ConfigFile, started: Instant) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!("bratu"));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("config_file_entries".into(), json!(file.entries()));
    m.insert("wall_time_s".into(), json!(started.elapsed().as_secs_f64()));
    m
}

struct TraceRun {
    resolved: Resolved,
    n: usize,
    target: f64,
    /// No explicit target was given.
    auto_target: bool,
}

fn resolve_trace(a: &TraceArgs, default_target: f64) -> Result<TraceRun, CliError> {
    let mut resolved = resolve_common(&a.common, &["n", "target_ustar"])?;
    let n = element_count(&resolved.file, a.n)?;
    let picked = resolved.file.pick("target_ustar", a.target_ustar)?;
    let target = picked.unwrap_or(default_target);
    resolved.config.target_u_star = target;
    resolved.config.validate()?;
    resolved.scheme.validate()?;
    Ok(TraceRun {
        resolved,
        n,
        target,
        auto_target: picked.is_none(),
    })
}

/// Accepted points in order, plus the error that stopped tracing early.
fn run_trace(r: &TraceRun) -> Result<(Vec<BranchPoint>, Option<BratuError>), CliError> {
    let grid = Arc::new(Grid::new(r.n)?);
    let mut tracer = BranchTracer::new(r.resolved.scheme, grid, r.resolved.config)?;
    let mut points = Vec::new();
    loop {
        match tracer.next_point() {
            Ok(Some(p)) => points.push(p),
            Ok(None) => return Ok((points, None)),
            Err(e) => return Ok((points, Some(e))),
        }
    }
}

/// Accepted points with the located critical points merged in by arclength.
/// Returns the rows and, for each inserted row, its index and kind.
fn branch_rows(r: &TraceRun, points: Vec<BranchPoint>) -> (Vec<BranchPoint>, Vec<Value>) {
    let found = locate_critical_points(&points, &r.resolved.scheme, &r.resolved.config);
    let mut extra: Vec<(BranchPoint, CriticalPoint)> = found
        .points
        .into_iter()
        .filter_map(|c| {
            BranchPoint::new(&r.resolved.scheme, c.state.clone(), c.s, 0)
                .ok()
                .map(|b| (b, c))
        })
        .collect();
    extra.sort_by(|a, b| a.0.s.total_cmp(&b.0.s));
    let mut rows = Vec::with_capacity(points.len() + extra.len());
    let mut marks = Vec::new();
    let mut extra = extra.into_iter().peekable();
    for p in points {
        while let Some((b, c)) = extra.next_if(|(b, _)| b.s < p.s) {
            marks.push(json!({"step": rows.len(), "kind": c.kind, "sigma_hat": c.sigma_hat}));
            rows.push(b);
        }
        rows.push(p);
    }
    (rows, marks)
}

pub fn cmd_branch(a: &TraceArgs) -> Result<i32, CliError> {
    let started = Instant::now();
    let r = resolve_trace(a, ContinuationConfig::default().target_u_star)?;
    let (points, error) = run_trace(&r)?;
    let accepted = points.len();
    let (points, marks) = branch_rows(&r, points);
    let rows = points.iter().enumerate().map(|(i, p)| {
        vec![
            i.to_string(),
            num(p.s),
            num(p.state.lambda),
            num(p.u_star),
            num(p.mu_min),
            p.neg_count.to_string(),
            p.newton_iters.to_string(),
        ]
    });
    let text = csv("step,s,lambda,u_star,mu_min,neg_count,newton_iters", rows);
    write_text(r.resolved.out.as_deref(), &text)?;
    if let Some(out) = &r.resolved.out {
        let mut meta = base_meta("branch", &r.resolved.file, started);
        meta.insert("scheme".into(), scheme_meta(&r.resolved.scheme));
        meta.insert("n_elements".into(), json!(r.n));
        meta.insert("continuation".into(), json!(r.resolved.config));
        meta.insert("accepted_points".into(), json!(points.len()));
        meta.insert("continuation_steps".into(), json!(accepted));
        meta.insert(
            "critical_rows".into(),
            json!({
                "note": "located critical points inserted by arclength; newton_iters is 0 on these rows",
                "rows": marks,
            }),
        );
        meta.insert("complete".into(), json!(error.is_none()));
        meta.insert("error".into(), json!(error.as_ref().map(|e| e.to_string())));
        write_json(&sidecar(out, ".meta.json"), &Value::Object(meta))?;
    }
    Ok(match error {
        None => EXIT_OK,
        Some(e) => {
            eprintln!("error: {e} (partial branch written)");
            EXIT_NUMERICAL
        }
    })
}

fn critical_json(p: &CriticalPoint) -> Value {
    json!({
        "kind": p.kind,
        "lambda0": p.lambda,
        "u_star": p.u_star,
        "s": p.s,
        "mu": p.mu,
        "sigma_hat": p.sigma_hat,
        "ambiguous": p.ambiguous,
        "antisymmetry_index": p.antisymmetry_index,
        "sawtooth_fraction": p.sawtooth_fraction,
        "eigenvector": p.psi,
    })
}

pub fn cmd_critical(a: &TraceArgs) -> Result<i32, CliError> {
    let started = Instant::now();
    let r = resolve_trace(a, DEFAULT_SEARCH_CAP)?;
    let (points, found, error) = if r.auto_target {
        let grid = Arc::new(Grid::new(r.n)?);
        let search = trace_to_first_bifurcation(&r.resolved.scheme, grid, &r.resolved.config)?;
        (search.trace, search.critical, search.error)
    } else {
        let (points, error) = run_trace(&r)?;
        let found = locate_critical_points(&points, &r.resolved.scheme, &r.resolved.config);
        (points, found, error)
    };
    let list: Vec<Value> = found.points.iter().map(critical_json).collect();
    let text = serde_json::to_string_pretty(&list).map_err(|e| CliError::Numerical(e.to_string()))? + "\n";
    write_text(r.resolved.out.as_deref(), &text)?;
    for lost in &found.lost {
        eprintln!("warning: bracket s in [{}, {}] lost: {}", lost.s_lo, lost.s_hi, lost.reason);
    }
    if let Some(out) = &r.resolved.out {
        let mut meta = base_meta("critical", &r.resolved.file, started);
        meta.insert("scheme".into(), scheme_meta(&r.resolved.scheme));
        meta.insert("n_elements".into(), json!(r.n));
        meta.insert("continuation".into(), json!(r.resolved.config));
        meta.insert("target_ustar".into(), json!(r.target));
        meta.insert("stop_at_first_bifurcation".into(), json!(r.auto_target));
        meta.insert("accepted_points".into(), json!(points.len()));
        meta.insert("lost_brackets".into(), json!(found.lost));
        meta.insert("complete".into(), json!(error.is_none()));
        meta.insert("error".into(), json!(error.as_ref().map(|e| e.to_string())));
        write_json(&sidecar(out, ".meta.json"), &Value::Object(meta))?;
    }
    Ok(match error {
        None => EXIT_OK,
        Some(e) => {
            eprintln!("error: {e}");
            EXIT_NUMERICAL
        }
    })
}

/// One row of the bifurcation table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TableRow {
    pub n: usize,
    pub lambda0: Option<f64>,
    pub u_star: Option<f64>,
    pub status: String,
}

/// First bifurcation for each odd `N`, computed concurrently and returned
/// in input order. Even `N` are skipped.
pub fn bifurcation_table(scheme: &Scheme, config: &ContinuationConfig, ns: &[usize]) -> Vec<TableRow> {
    use rayon::prelude::*;
    let one = |&n: &usize| -> TableRow {
        let row = |lambda0, u_star, status: String| TableRow {
            n,
            lambda0,
            u_star,
            status,
        };
        let grid = match Grid::new(n) {
            Ok(g) => Arc::new(g),
            Err(e) => return row(None, None, format!("error: {e}")),
        };
        match trace_to_first_bifurcation(scheme, grid, config) {
            Err(e) => row(None, None, format!("error: {e}")),
            Ok(search) => match (search.first_bifurcation(), &search.error) {
                (Some(p), _) => row(Some(p.lambda), Some(p.u_star), "ok".into()),
                (None, Some(e)) => row(None, None, format!("error: {e}")),
                (None, None) => row(None, None, "not_found".into()),
            },
        }
    };
    let odd: Vec<usize> = ns.iter().copied().filter(|n| n % 2 == 1).collect();
    let threads = std::env::var("BRATU_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&t| t > 0);
    match threads.and_then(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build().ok()) {
        Some(pool) => pool.install(|| odd.par_iter().map(one).collect()),
        None => odd.par_iter().map(one).collect(),
    }
}

pub fn cmd_table(a: &TableArgs) -> Result<i32, CliError> {
    let started = Instant::now();
    let mut resolved = resolve_common(&a.common, &["n_list", "max_ustar"])?;
    let list: String = resolved
        .file
        .pick("n_list", a.n_list.clone())?
        .ok_or_else(|| usage("--n-list is required"))?;
    let ns = parse_n_list(&list)?;
    if let Some(n) = ns.iter().find(|&&n| n < 2) {
        return Err(usage(format!("need at least 2 elements, got {n}")).into());
    }
    let cap = resolved.file.pick("max_ustar", a.max_ustar)?.unwrap_or(DEFAULT_SEARCH_CAP);
    resolved.config.target_u_star = cap;
    resolved.config.validate()?;
    for n in ns.iter().filter(|n| *n % 2 == 0) {
        eprintln!("warning: N = {n} is even; spurious bifurcations only occur for odd N, skipped");
    }
    let rows = bifurcation_table(&resolved.scheme, &resolved.config, &ns);
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let text = csv(
        "N,lambda0,u_star,status",
        rows.iter().map(|r| vec![r.n.to_string(), opt(r.lambda0), opt(r.u_star), r.status.clone()]),
    );
    write_text(resolved.out.as_deref(), &text)?;
    if let Some(out) = &resolved.out {
        let mut meta = base_meta("table", &resolved.file, started);
        meta.insert("scheme".into(), scheme_meta(&resolved.scheme));
        meta.insert("n_list".into(), json!(ns));
        meta.insert("continuation".into(), json!(resolved.config));
        meta.insert("rows".into(), json!(rows));
        write_json(&sidecar(out, ".meta.json"), &Value::Object(meta))?;
    }
    let failed: Vec<usize> = rows.iter().filter(|r| r.status != "ok").map(|r| r.n).collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: no bifurcation found for N = {failed:?}");
        Ok(EXIT_NUMERICAL)
    }
}

pub fn cmd_analytic(a: &AnalyticArgs) -> Result<i32, CliError> {
    let file = ConfigFile::load(a.config.as_deref())?;
    file.check_keys(&["alpha_max", "samples", "out"])?;
    let alpha_max: f64 = file.pick("alpha_max", a.alpha_max)?.unwrap_or(10.0);
    let samples: usize = file.pick("samples", a.samples)?.unwrap_or(201);
    let out = file.pick::<PathBuf>("out", a.out.clone())?;
    if !(alpha_max > 0.0 && alpha_max.is_finite()) {
        return Err(usage(format!("--alpha-max must be positive, got {alpha_max}")).into());
    }
    if samples < 2 {
        return Err(usage(format!("--samples must be at least 2, got {samples}")).into());
    }
    if a.critical {
        let root = find_alpha_bar();
        let report = json!({
            "alpha_bar": root.alpha_bar,
            "lambda_bar": root.lambda_bar,
            "u_star_bar": root.u_star_bar,
            "inner_product": inner_product_closed_form(root.alpha_bar),
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("plain JSON"));
    }
    if out.is_some() || !a.critical {
        let rows = (0..samples).map(|i| {
            let alpha = if i + 1 == samples { alpha_max } else { alpha_max * i as f64 / (samples - 1) as f64 };
            vec![num(alpha), num(lambda_of_alpha(alpha)), num(ustar_of_alpha(alpha))]
        });
        write_text(out.as_deref(), &csv("alpha,lambda0,u_star", rows))?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_scan(a: &ScanArgs) -> Result<i32, CliError> {
    let started = Instant::now();
    let file = ConfigFile::load(a.config.as_deref())?;
    file.check_keys(&["form", "n", "alpha_min", "alpha_max", "steps", "out"])?;
    let form = match file.pick("form", a.form)?.unwrap_or(FormArg::Legendre) {
        FormArg::Original => ScanForm::OriginalX,
        FormArg::Legendre => ScanForm::LegendreT,
        FormArg::OriginalExact => ScanForm::OriginalExact,
    };
    let n = element_count(&file, a.n)?;
    let alpha_min: f64 = file.pick("alpha_min", a.alpha_min)?.unwrap_or(0.1);
    let default_max = if form == ScanForm::LegendreT { 15.0 } else { 60.0 };
    let alpha_max: f64 = file.pick("alpha_max", a.alpha_max)?.unwrap_or(default_max);
    let steps: usize = file.pick("steps", a.steps)?.unwrap_or(DEFAULT_STEPS);
    let out = file.pick::<PathBuf>("out", a.out.clone())?;
    if form == ScanForm::LegendreT && alpha_max > LEGENDRE_ALPHA_CAP {
        return Err(usage(format!(
            "the Legendre form is limited to alpha_max <= {LEGENDRE_ALPHA_CAP} (tanh(alpha) rounds to 1 beyond it)"
        ))
        .into());
    }
    let alphas = alpha_grid(alpha_min, alpha_max, steps).map_err(|e| usage(e.to_string()))?;
    let result = scan_on_grid(form, n, alphas)?;
    let rows = result
        .alpha_grid
        .iter()
        .zip(&result.indicator)
        .map(|(a, v)| vec![num(*a), num(*v)]);
    write_text(out.as_deref(), &csv("alpha,indicator", rows))?;
    match &out {
        Some(out) => {
            write_json(&sidecar(out, ".roots.json"), &result.roots)?;
            let mut meta = base_meta("scan", &file, started);
            meta.insert("form".into(), json!(form.name()));
            meta.insert("indicator".into(), json!(form.indicator_name()));
            meta.insert("n_elements".into(), json!(n));
            meta.insert("alpha_min".into(), json!(alpha_min));
            meta.insert("alpha_max".into(), json!(alpha_max));
            meta.insert("steps".into(), json!(steps));
            meta.insert("grid".into(), json!("uniform up to alpha = 5, geometric beyond"));
            meta.insert("root_count".into(), json!(result.roots.len()));
            write_json(&sidecar(out, ".meta.json"), &Value::Object(meta))?;
        }
        None => {
            for root in &result.roots {
                eprintln!("root: alpha = {}", num(root.alpha));
            }
        }
    }
    Ok(EXIT_OK)
}

/// Reads a CSV written by this tool back into a header and rows of fields.
pub fn read_csv(path: &Path) -> std::io::Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    Ok((header, rows))
}
