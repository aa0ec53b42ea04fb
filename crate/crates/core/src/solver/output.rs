use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{SimConfig, SolverError, Trajectory};
use crate::domain::io::write_csv;

/// Contents of `manifest.json` in a trajectory directory.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryManifest {
    pub config: serde_json::Value,
    pub grid: crate::domain::GridHeader,
    pub snapshots: Vec<Snapshot>,
    pub mass: f64,
    pub mass_series: Vec<f64>,
    pub min_u_series: Vec<f64>,
    pub min_v_series: Vec<f64>,
    pub steps: usize,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: String,
    pub v: String,
}

/// Writes `u_NNNN.csv` and `v_NNNN.csv` per recorded time plus
/// `manifest.json`; returns the manifest and every file written.
pub fn write_trajectory(
    dir: &Path,
    cfg: &SimConfig,
    traj: &Trajectory,
) -> Result<(TrajectoryManifest, Vec<PathBuf>), SolverError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut snapshots = Vec::new();
    for (k, s) in traj.states.iter().enumerate() {
        let u_name = format!("u_{k:04}.csv");
        let v_name = format!("v_{k:04}.csv");
        for (name, field) in [(&u_name, &s.u), (&v_name, &s.v)] {
            let path = dir.join(name);
            write_csv(field, BufWriter::new(File::create(&path)?))?;
            files.push(path);
        }
        snapshots.push(Snapshot {
            t: s.t,
            u: u_name,
            v: v_name,
        });
    }
    let manifest = TrajectoryManifest {
        config: cfg.echo(),
        grid: cfg.grid.header(),
        snapshots,
        mass: traj.mass,
        mass_series: traj.mass_series.clone(),
        min_u_series: traj.min_u_series.clone(),
        min_v_series: traj.min_v_series.clone(),
        steps: traj.steps,
        wall_time_s: traj.wall_time_s,
        warnings: traj.warnings.clone(),
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    fs::write(&path, json)?;
    files.push(path);
    Ok((manifest, files))
}
