//! Runs the regularized system from a Dirac mass and writes the trajectory.
//!
//! `cargo run --release --example simulate_dirac_1d -- [out_dir]`

use kslab::domain::{lr_norm, Grid};
use kslab::harness::Problem;
use kslab::solver::{simulate, write_trajectory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "runs/simulate_dirac_1d".into());
    let mut p = Problem::canned(Grid::unit_interval(512)?, "dirac", "cosine", 1.0, 0.3, 1e-4, 0.05)?;
    p.cfg = p.cfg.with_output_times(vec![1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2])?;
    let traj = simulate(&p.cfg, &p.mu0, &p.v0)?;
    for s in &traj.states {
        println!(
            "t = {:<6} ||u||_inf = {:>9.4} ||u||_2 = {:>7.4} min v = {:.4}",
            s.t,
            lr_norm(&s.u, f64::INFINITY)?,
            lr_norm(&s.u, 2.0)?,
            s.v.min()
        );
    }
    let (_, files) = write_trajectory(std::path::Path::new(&out), &p.cfg, &traj)?;
    println!("{} steps, {} files in {out}", traj.steps, files.len());
    Ok(())
}
