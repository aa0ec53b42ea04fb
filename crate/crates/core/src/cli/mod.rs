//! Command-line front end: `params`, `simulate`, `experiment`, `verify`.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::domain::LpExponent;
use crate::harness::{default_problem, run_experiment, run_suite, write_report, Assertion, SUITES};
use crate::model::{
    admissible_q_interval, admissible_r_interval, alpha_clamp, alpha_threshold, decay_plan, select_exponents,
    verify_exponent_properties, Interval,
};
use crate::solver::{simulate, write_trajectory};
use config::{experiment_params, ConfigMap, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "kslab", version, about = "Flux-limited Keller-Segel lab with measure-valued initial data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Admissible exponent ranges and the exponent selection, as JSON.
    Params {
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(short = 'a', long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(short = 'q', long)]
        q: Option<f64>,
        /// Lebesgue exponent; `inf` is accepted.
        #[arg(short = 'r', long)]
        r: Option<LpExponent>,
    },
    /// Runs a configured simulation and writes its trajectory.
    Simulate {
        config: PathBuf,
        /// Overrides a config key, e.g. `--set eps=1e-3`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a named experiment.
    Experiment {
        name: String,
        /// Config file describing the problem; defaults to the canned problem.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a verification suite and prints a JSON summary.
    Verify { suite: String },
}

/// Provenance and outcome of one `simulate` or `experiment` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub version: String,
    pub seed: u64,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub outputs: Vec<String>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn interval_json(i: &Interval) -> Value {
    json!({
        "lower": i.lower,
        "upper": if i.upper.is_finite() { json!(i.upper) } else { json!("inf") },
        "upper_closed": i.upper_closed,
        "text": i.to_string(),
    })
}

/// JSON for `params`; errors name the violated condition.
pub fn params_json(n: usize, alpha: f64, q: Option<f64>, r: Option<LpExponent>) -> Result<Value> {
    let threshold = alpha_threshold(n)?;
    let qi = admissible_q_interval(n, alpha)?;
    let alpha_eff = alpha_clamp(alpha);
    let mut out = json!({
        "n": n,
        "alpha": alpha,
        "alpha_threshold": threshold,
        "alpha_eff": alpha_eff,
        "alpha_clamped": alpha_eff != alpha,
        "q_interval": interval_json(&qi),
    });
    let Some(q) = q else {
        if r.is_some() {
            bail!("-r needs -q");
        }
        return Ok(out);
    };
    let ri = admissible_r_interval(n, alpha, q)?;
    out["q"] = json!(q);
    out["r_interval"] = interval_json(&ri);
    if let Some(r) = r {
        let sel = select_exponents(n, alpha, q, r)?;
        out["selection"] = serde_json::to_value(sel)?;
        out["checks"] = serde_json::to_value(verify_exponent_properties(&sel))?;
        let plan = decay_plan(n, alpha, q, r)?;
        out["predicted_decay_exponent"] = json!(plan.predicted_exponent);
    }
    Ok(out)
}

fn load_config(path: Option<&Path>, set: &[String]) -> Result<ConfigMap> {
    let mut map = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ConfigMap::parse(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => ConfigMap::default(),
    };
    for s in set {
        map.set(s)?;
    }
    Ok(map)
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let path = dir.join("run.json");
    fs::write(&path, serde_json::to_string_pretty(manifest)?)?;
    Ok(path)
}

fn rel(dir: &Path, files: &[PathBuf]) -> Vec<String> {
    files
        .iter()
        .map(|f| f.strip_prefix(dir).unwrap_or(f).display().to_string())
        .collect()
}

fn cmd_simulate(config: &Path, set: &[String], out: Option<PathBuf>) -> Result<bool> {
    let started = unix_now();
    let map = load_config(Some(config), set)?;
    let run = RunConfig::from_map(&map).with_context(|| format!("in {}", config.display()))?;
    let dir = out
        .or(run.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(config.file_stem().unwrap_or_default()));
    let p = &run.problem;
    let traj = simulate(&p.cfg, &p.mu0, &p.v0)?;
    for w in &traj.warnings {
        eprintln!("warning: {w}");
    }
    let (_, mut files) = write_trajectory(&dir, &p.cfg, &traj)?;
    let drift = traj
        .mass_series
        .iter()
        .map(|m| (m - traj.mass).abs() / traj.mass)
        .fold(0.0, f64::max);
    let min_u = traj.min_u_series.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_v = traj.min_v_series.iter().cloned().fold(f64::INFINITY, f64::min);
    let assertions = vec![
        Assertion::new("mass_conservation", drift <= 1e-8, format!("max relative drift {drift:e}")),
        Assertion::new("u_nonnegative", min_u >= -1e-12, format!("min u {min_u:e}")),
        Assertion::new("v_nonnegative", min_v >= -1e-12, format!("min v {min_v:e}")),
    ];
    let passed = assertions.iter().all(|a| a.passed);
    let mut manifest = RunManifest {
        command: "simulate".into(),
        config: json!({ "file": map.echo(), "resolved": p.cfg.echo() }),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: run.seed,
        started_unix_s: started,
        finished_unix_s: unix_now(),
        outputs: Vec::new(),
        assertions,
        passed,
    };
    files.push(dir.join("run.json"));
    manifest.outputs = rel(&dir, &files);
    write_manifest(&dir, &manifest)?;
    println!("{}", serde_json::to_string_pretty(&json!({ "dir": dir, "passed": passed, "snapshots": traj.times.len() }))?);
    Ok(passed)
}

fn cmd_experiment(name: &str, config: Option<&Path>, set: &[String], out: Option<PathBuf>) -> Result<bool> {
    let started = unix_now();
    let map = load_config(config, set)?;
    let params = experiment_params(&map, name)?;
    let (problem, seed, cfg_dir) = if config.is_some() || map.contains("grid.cells") {
        let run = RunConfig::from_map(&map)?;
        (run.problem, run.seed, run.out_dir)
    } else {
        (default_problem(name)?, map.get("seed")?.unwrap_or(0), map.get::<String>("output.dir")?.map(PathBuf::from))
    };
    let report = run_experiment(name, &problem, &params)?;
    let dir = out.or(cfg_dir).unwrap_or_else(|| PathBuf::from("runs").join(&report.name));
    let mut files = write_report(&dir, &report)?;
    files.push(dir.join("run.json"));
    let manifest = RunManifest {
        command: format!("experiment {name}"),
        config: json!({ "file": map.echo(), "resolved": problem.cfg.echo(), "params": params }),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        started_unix_s: started,
        finished_unix_s: unix_now(),
        outputs: rel(&dir, &files),
        assertions: report.assertions.clone(),
        passed: report.passed(),
    };
    write_manifest(&dir, &manifest)?;
    let summary = json!({
        "experiment": report.name,
        "dir": dir,
        "fit": report.fit,
        "predicted_exponent": report.predicted_exponent,
        "metrics": report.metrics,
        "assertions": report.assertions,
        "passed": report.passed(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(report.passed())
}

fn cmd_verify(suite: &str) -> Result<bool> {
    if !SUITES.contains(&suite) {
        bail!("unknown suite {suite:?}; available: {}", SUITES.join(", "));
    }
    let report = run_suite(suite)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.passed)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("KSLAB_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("KSLAB_THREADS={v:?}"))?;
        if n == 0 {
            bail!("KSLAB_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    Ok(())
}

/// Runs the command line and returns the process exit code: 0 when every
/// assertion passed, 1 on a failed assertion, 2 on an error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|_| match cli.command {
        Command::Params { n, alpha, q, r } => {
            let v = params_json(n, alpha, q, r)?;
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(true)
        }
        Command::Simulate { config, set, out } => cmd_simulate(&config, &set, out),
        Command::Experiment { name, config, set, out } => cmd_experiment(&name, config.as_deref(), &set, out),
        Command::Verify { suite } => cmd_verify(&suite),
    });
    let _ = std::io::stdout().flush();
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}
