//! Mollifying a Dirac mass: the weak-* gap to the measure shrinks with eps.

use kslab::domain::{integrate, lr_norm, Grid};
use kslab::measure::{default_dictionary, mollify, preset, weak_star_gap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::unit_interval(1024)?;
    // The preset snaps the atom to a cell center, so deposition is exact.
    let mu = preset("dirac", &grid, 1.0)?;
    let dict = default_dictionary(grid.extents(), 4);
    println!("{:>8} {:>12} {:>12} {:>10}", "eps", "mass", "sup", "gap");
    for k in 1..=6 {
        let eps = 10f64.powi(-k);
        let u = mollify(&mu, eps, &grid)?;
        println!(
            "{eps:>8.0e} {:>12.10} {:>12.4} {:>10.2e}",
            integrate(&u),
            lr_norm(&u, f64::INFINITY)?,
            weak_star_gap(&u, &mu, &dict)?
        );
    }
    Ok(())
}
