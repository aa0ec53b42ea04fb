//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, keys are dotted
//! (`grid.cells = 256`). Lists are comma separated; atom lists separate
//! atoms with `;`. Later assignments, including `--set` overrides, replace
//! earlier ones.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::domain::{Field, Grid, LpExponent};
use crate::harness::{log_spaced, ExperimentParams, Problem, Window};
use crate::measure::{preset, Atom, RadonMeasure};
use crate::model::Sensitivity;
use crate::solver::SimConfig;

/// Every key the parser accepts.
pub const KEYS: [&str; 29] = [
    "grid.extents",
    "grid.cells",
    "model.k_f",
    "model.alpha",
    "eps",
    "dt_safety",
    "max_dt",
    "t_end",
    "output.times",
    "output.count",
    "output.dir",
    "measure.preset",
    "measure.mass",
    "measure.atoms",
    "measure.density",
    "measure.density_mass",
    "signal",
    "seed",
    "experiment.r",
    "experiment.q",
    "experiment.p",
    "experiment.slack",
    "experiment.t_min",
    "experiment.t_max",
    "experiment.samples",
    "experiment.kmax",
    "experiment.eps_list",
    "experiment.t_final",
    "title",
];

/// Where a value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => write!(f, "--set"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: expected `key = value`, got {text:?}")]
    Syntax { origin: Origin, text: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: key `{key}`: {message}")]
    Value { origin: Origin, key: String, message: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Parsed assignments, keyed by dotted name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, Entry>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            map.assign(line, Origin::Line(k + 1))?;
        }
        Ok(map)
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        self.assign(assignment, Origin::Override)
    }

    fn assign(&mut self, text: &str, origin: Origin) -> Result<(), ConfigError> {
        let (key, value) = text.split_once('=').ok_or_else(|| ConfigError::Syntax {
            origin: origin.clone(),
            text: text.to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                origin,
                text: text.to_string(),
            });
        }
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                origin,
                key: key.to_string(),
            });
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                origin,
            },
        );
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let origin = self.entries.get(key).map_or(Origin::Override, |e| e.origin.clone());
        ConfigError::Value {
            origin,
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Same as [`err`] but usable from outside for semantic checks.
    pub fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        self.err(key, message)
    }

    fn parse_one<T: std::str::FromStr>(&self, key: &str, s: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        s.trim()
            .parse::<T>()
            .map_err(|e| self.err(key, format!("cannot parse {:?}: {e}", s.trim())))
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key).map(|s| self.parse_one(key, s)).transpose()
    }

    pub fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.get(key)?.ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    pub fn get_list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|s| s.split(',').map(|p| self.parse_one(key, p)).collect())
            .transpose()
    }

    /// Echo of every assignment, for manifests.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect()
    }
}

/// A simulation problem built from a configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: Problem,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_map(map: &ConfigMap) -> Result<Self, ConfigError> {
        let cells: Vec<usize> = map
            .get_list("grid.cells")?
            .ok_or_else(|| ConfigError::Missing("grid.cells".into()))?;
        let extents: Vec<f64> = map.get_list("grid.extents")?.unwrap_or_else(|| vec![1.0; cells.len()]);
        let grid = Grid::new(&extents, &cells).map_err(|e| map.err("grid.cells", e.to_string()))?;

        let k_f: f64 = map.get("model.k_f")?.unwrap_or(1.0);
        let alpha: f64 = map.get("model.alpha")?.unwrap_or(0.3);
        let sens = if k_f == 0.0 {
            Sensitivity::control(alpha)
        } else {
            Sensitivity::new(k_f, alpha)
        }
        .map_err(|e| map.err(if map.contains("model.k_f") { "model.k_f" } else { "model.alpha" }, e.to_string()))?;

        let eps: f64 = map.require("eps")?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(map.err("eps", "eps must lie in (0,1)"));
        }
        let t_end: f64 = map.require("t_end")?;
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(map.err("t_end", "t_end must be positive"));
        }
        let mut cfg = SimConfig::new(grid, sens, eps, t_end).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(s) = map.get::<f64>("dt_safety")? {
            cfg = cfg.with_dt_safety(s).map_err(|e| map.err("dt_safety", e.to_string()))?;
        }
        if let Some(m) = map.get::<f64>("max_dt")? {
            cfg = cfg.with_max_dt(m).map_err(|e| map.err("max_dt", e.to_string()))?;
        }
        let times = match (map.get_list::<f64>("output.times")?, map.get::<usize>("output.count")?) {
            (Some(t), _) => t,
            (None, Some(count)) if count >= 1 => (1..=count).map(|k| t_end * (k as f64 / count as f64)).collect(),
            (None, Some(_)) => return Err(map.err("output.count", "must be at least 1")),
            (None, None) => log_spaced(t_end / 100.0, t_end, 5),
        };
        let key = if map.contains("output.times") { "output.times" } else { "output.count" };
        cfg = cfg.with_output_times(times).map_err(|e| map.err(key, e.to_string()))?;

        let mu0 = measure_from(map, &grid)?;
        let signal: String = map.get("signal")?.unwrap_or_else(|| "cosine".to_string());
        let v0 = Problem::signal(&signal, &grid).map_err(|e| map.err("signal", e.to_string()))?;
        let problem = Problem::new(cfg, mu0, v0).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(Self {
            problem,
            out_dir: map.get::<String>("output.dir")?.map(PathBuf::from),
            seed: map.get("seed")?.unwrap_or(0),
        })
    }
}

fn measure_from(map: &ConfigMap, grid: &Grid) -> Result<RadonMeasure, ConfigError> {
    let mass: f64 = map.get("measure.mass")?.unwrap_or(1.0);
    if let Some(name) = map.get::<String>("measure.preset")? {
        return preset(&name, grid, mass).map_err(|e| map.err("measure.preset", e.to_string()));
    }
    let mut atoms = Vec::new();
    if let Some(text) = map.raw("measure.atoms") {
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let nums: Vec<f64> = part
                .split(',')
                .map(|s| map.parse_one("measure.atoms", s))
                .collect::<Result<_, _>>()?;
            if nums.len() != grid.dim() + 1 {
                return Err(map.err(
                    "measure.atoms",
                    format!("atom {part:?} needs {} coordinates and a weight", grid.dim()),
                ));
            }
            let (pos, w) = nums.split_at(grid.dim());
            atoms.push(Atom::new(pos.to_vec(), w[0]));
        }
    }
    let density: Option<Field> = match map.get::<String>("measure.density")? {
        Some(name) => {
            let dm: f64 = map.get("measure.density_mass")?.unwrap_or(mass);
            let mu = preset(&name, grid, dm).map_err(|e| map.err("measure.density", e.to_string()))?;
            match mu.density() {
                Some(d) => Some(d.clone()),
                None => return Err(map.err("measure.density", format!("{name:?} is not a density"))),
            }
        }
        None => None,
    };
    if atoms.is_empty() && density.is_none() {
        return Err(ConfigError::Missing("measure.preset (or measure.atoms / measure.density)".into()));
    }
    let key = if map.contains("measure.atoms") { "measure.atoms" } else { "measure.density" };
    RadonMeasure::new(grid.extents(), atoms, density).map_err(|e| map.err(key, e.to_string()))
}

/// Experiment parameters: defaults for `name` with `experiment.*` keys applied.
pub fn experiment_params(map: &ConfigMap, name: &str) -> Result<ExperimentParams, ConfigError> {
    let mut p = ExperimentParams::defaults_for(name).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if let Some(r) = map.get::<LpExponent>("experiment.r")? {
        p.r = r;
    }
    if let Some(q) = map.get("experiment.q")? {
        p.q = q;
    }
    if let Some(v) = map.get("experiment.p")? {
        p.p = v;
    }
    if let Some(s) = map.get("experiment.slack")? {
        p.slack = s;
    }
    if let Some(k) = map.get("experiment.kmax")? {
        p.kmax = k;
    }
    if let Some(e) = map.get_list("experiment.eps_list")? {
        p.eps_list = e;
    }
    if let Some(t) = map.get("experiment.t_final")? {
        p.t_final = t;
    }
    let t_min = map.get("experiment.t_min")?.unwrap_or(p.window.t_min);
    let t_max = map.get("experiment.t_max")?.unwrap_or(p.window.t_max);
    let samples = map.get("experiment.samples")?.unwrap_or(p.window.samples);
    p.window = Window::new(t_min, t_max, samples).map_err(|e| map.err("experiment.t_min", e.to_string()))?;
    Ok(p)
}
