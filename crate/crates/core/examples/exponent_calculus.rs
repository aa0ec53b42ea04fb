//! Admissible ranges and the exponent selection for a few `(n, alpha, q, r)`.

use kslab::model::{
    admissible_q_interval, admissible_r_interval, alpha_threshold, decay_plan, select_exponents,
    verify_exponent_properties,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, alpha, q, r) in [(1, 0.3, 1.5, 2.0), (2, 0.3, 1.2, 2.0), (3, 0.4, 1.3, 2.5)] {
        let qi = admissible_q_interval(n, alpha)?;
        let ri = admissible_r_interval(n, alpha, q)?;
        let sel = select_exponents(n, alpha, q, r)?;
        println!("n = {n}, alpha = {alpha} (threshold {}), q in {qi}, r in {ri}", alpha_threshold(n)?);
        println!(
            "  delta = ({:.4}, {:.4}, {:.4})  s1 = {:.4}  s2 = {:.4}  s = {:.4}  theta = {:.4}",
            sel.delta1, sel.delta2, sel.delta3, sel.s1, sel.s2, sel.s, sel.theta
        );
        println!("  properties hold: {}", verify_exponent_properties(&sel).all());
        println!("  ||u(t)||_{r} ~ t^{:.4}", decay_plan(n, alpha, q, r)?.predicted_exponent);
    }

    // Outside the admissible range the error names the violated condition.
    if let Err(e) = admissible_q_interval(3, 0.2) {
        println!("n = 3, alpha = 0.2: {e}");
    }
    Ok(())
}
