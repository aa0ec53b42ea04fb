//! W^{1,q} distance of v(t) from v0 and the gradient norm over long times.

use kslab::harness::{run_experiment, ExperimentParams, Problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = Problem::dirac_1d(1.0)?;
    let near = run_experiment("v-continuity", &problem, &ExperimentParams::defaults_for("v-continuity")?)?;
    if let Some(fit) = near.fit {
        println!("||v(t) - v0||_(1,1.5) ~ t^{:.3}", fit.exponent);
    }
    let long = run_experiment(
        "gradient-uniformity",
        &problem,
        &ExperimentParams::defaults_for("gradient-uniformity")?,
    )?;
    for row in long.rows.iter().step_by(6) {
        println!("t = {:>9.2e}  ||grad v||_1.5 = {:.4}", row[0], row[1]);
    }
    println!(
        "first-decade mean {:.4}, last-decade mean {:.4}",
        long.metric("first_decade_mean").unwrap_or(f64::NAN),
        long.metric("last_decade_mean").unwrap_or(f64::NAN)
    );
    Ok(())
}
