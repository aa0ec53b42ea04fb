//! Final-time distances between consecutive regularization levels.

use kslab::harness::{run_experiment, ExperimentParams, Problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ExperimentParams {
        eps_list: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
        ..ExperimentParams::defaults_for("eps-ladder")?
    };
    let report = run_experiment("eps-ladder", &Problem::bump_1d(1.0)?, &params)?;
    println!("{:>8} {:>14} {:>14}", "eps", "|u_k - u_k+1|", "|v_k - v_k+1|");
    for row in &report.rows {
        println!("{:>8.0e} {:>14.4e} {:>14.4e}", row[0], row[1], row[2]);
    }
    Ok(())
}
