//! Smoothing rate in two dimensions (takes a few seconds in release mode).

use kslab::domain::Grid;
use kslab::harness::{run_experiment, ExperimentParams, Problem, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::rectangle([1.0, 1.0], [128, 128])?;
    let problem = Problem::canned(grid, "dirac", "cosine", 1.0, 0.3, 1e-5, 1.0)?;
    let params = ExperimentParams {
        window: Window::new(2e-3, 1.5e-2, 12)?,
        slack: 0.1,
        ..ExperimentParams::defaults_for("smoothing")?
    };
    let report = run_experiment("smoothing", &problem, &params)?;
    for row in &report.rows {
        println!("t = {:.4}  ||u||_2 = {:.4}", row[0], row[1]);
    }
    if let Some(fit) = report.fit {
        println!("||u(t)||_2 ~ t^{:.4} (predicted -0.5)", fit.exponent);
    }
    Ok(())
}
