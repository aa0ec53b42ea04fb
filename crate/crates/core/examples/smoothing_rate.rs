//! Fitted L^2 decay rate after a Dirac start, with and without taxis.

use kslab::harness::{run_experiment, ExperimentParams, Problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ExperimentParams::defaults_for("smoothing")?;
    for k_f in [0.0, 1.0, 4.0] {
        let report = run_experiment("smoothing", &Problem::dirac_1d(k_f)?, &params)?;
        let fit = report.fit.expect("smoothing fits a rate");
        println!(
            "k_f = {k_f}: ||u(t)||_2 ~ t^{:.4} (r^2 = {:.5}, predicted {:.2}), sup t^(1/4)||u||_2 = {:.4}",
            fit.exponent,
            fit.r_squared,
            report.predicted_exponent.unwrap_or(f64::NAN),
            report.metric("scaled_sup").unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
