//! Neumann heat semigroup on a cosine mode, and the Duhamel solver against
//! its closed form.

use std::f64::consts::PI;

use kslab::domain::{lr_norm, Field, Grid, LpExponent};
use kslab::semigroup::{duhamel_solve, heat_propagate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::rectangle([1.0, 2.0], [64, 48])?;
    let mode = Field::from_fn(grid, |x| (2.0 * PI * x[0]).cos() * (PI * x[1] / 2.0).cos())?;
    let lambda = (2.0 * PI).powi(2) + (PI / 2.0).powi(2);
    for t in [1e-3, 1e-2, 1e-1] {
        let out = heat_propagate(&mode, t)?;
        let err = lr_norm(&out.sub(&mode.scale((-lambda * t).exp()))?, LpExponent::Infinity)?;
        println!("t = {t:<6} |e^(t Delta) phi - e^(-lambda t) phi|_inf = {err:.2e}");
    }

    let line = Grid::unit_interval(64)?;
    let phi = Field::from_fn(line, |x| (PI * x[0]).cos())?;
    let t = 0.5;
    let exact = phi.scale((1.0 - (-(1.0 + PI * PI) * t).exp()) / (1.0 + PI * PI));
    for panels in [16, 64, 256, 1024] {
        let z = duhamel_solve(&Field::zeros(line), |_| phi.clone(), t, panels)?;
        let err = lr_norm(&z.sub(&exact)?, LpExponent::Infinity)?;
        println!("Duhamel, {panels:>4} panels: error {err:.2e}");
    }
    Ok(())
}
