//! Pairing gap between u(t) and the initial Dirac mass as t decreases.

use kslab::harness::{run_experiment, ExperimentParams, Problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_experiment("weak-star", &Problem::dirac_1d(1.0)?, &ExperimentParams::defaults_for("weak-star")?)?;
    for row in report.rows.iter().step_by(4) {
        println!("t = {:>9.2e}  gap = {:.4e}", row[0], row[1]);
    }
    if let Some(fit) = report.fit {
        println!("gap ~ t^{:.3}", fit.exponent);
    }
    for a in &report.assertions {
        println!("[{}] {}: {}", if a.passed { "ok" } else { "FAILED" }, a.name, a.detail);
    }
    Ok(())
}
