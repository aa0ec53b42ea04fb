use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::inequalities::{interpolation_inequality, random_nonnegative_field};
use super::problems::{default_problem, run_experiment, ExperimentParams, Problem};
use super::report::{Assertion, ExperimentReport};
use super::HarnessError;
use crate::domain::{lr_norm, Field, Grid, LpExponent};
use crate::model::{
    admissible_q_interval, admissible_r_interval, alpha_threshold, select_exponents, verify_exponent_properties,
};
use crate::semigroup::{duhamel_solve, heat_propagate};
use crate::solver::simulate;

pub const SUITES: [&str; 5] = ["exponents", "semigroup", "conservation", "rates-1d", "rates-2d"];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Assertion>,
    pub wall_time_s: f64,
}

pub fn run_suite(name: &str) -> Result<SuiteReport, HarnessError> {
    let start = Instant::now();
    let checks = match name {
        "exponents" => exponents()?,
        "semigroup" => semigroup()?,
        "conservation" => conservation()?,
        "rates-1d" => rates_1d()?,
        "rates-2d" => rates_2d()?,
        other => {
            return Err(HarnessError::UnknownSuite {
                name: other.to_string(),
                available: SUITES.join(", "),
            })
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// A random tuple `(n, alpha, q, r)` drawn inside the admissible intervals.
pub(crate) fn random_tuple<R: Rng>(rng: &mut R) -> (usize, f64, f64, f64) {
    let n = rng.random_range(1..=5usize);
    let th = alpha_threshold(n).expect("n >= 1");
    let alpha = th + (1.0 - th) * rng.random_range(0.001..0.999);
    let qi = admissible_q_interval(n, alpha).expect("alpha above threshold");
    let q_hi = if qi.is_bounded() { qi.upper } else { qi.lower + 5.0 };
    let q = qi.lower + (q_hi - qi.lower) * rng.random_range(0.001..0.999);
    let ri = admissible_r_interval(n, alpha, q).expect("q admissible");
    let r_hi = if ri.is_bounded() { ri.upper } else { ri.lower + 10.0 };
    let r = ri.lower + (r_hi - ri.lower) * rng.random_range(0.001..0.999);
    (n, alpha, q, r)
}

fn exponents() -> Result<Vec<Assertion>, HarnessError> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    for _ in 0..1000 {
        let (n, alpha, q, r) = random_tuple(&mut rng);
        match select_exponents(n, alpha, q, r) {
            Ok(sel) if verify_exponent_properties(&sel).all() => {}
            _ => failures += 1,
        }
    }
    checks.push(Assertion::new(
        "random_tuples_satisfy_properties",
        failures == 0,
        format!("{failures} of 1000 failed"),
    ));

    let sel = select_exponents(2, 0.3, 1.2, 2.0)?;
    let expected = [1.0 / 6.0, 0.5, 1.0 / 12.0, 12.0 / 7.0, 3.0, 12.0 / 11.0, 5.0 / 6.0];
    let got = [sel.delta1, sel.delta2, sel.delta3, sel.s1, sel.s2, sel.s, sel.theta];
    let err = expected.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(Assertion::new(
        "worked_selection",
        err <= 1e-12,
        format!("max deviation {err:e}"),
    ));

    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let (n, alpha, q, r) = random_tuple(&mut rng);
        let sel = select_exponents(n, alpha, q, r)?;
        let grid = if k % 2 == 0 {
            Grid::unit_interval(64)?
        } else {
            Grid::rectangle([1.0, 1.5], [12, 10])?
        };
        let u = random_nonnegative_field(&grid, &mut rng);
        worst = worst.max(interpolation_inequality(&u, &sel)?.ratio);
    }
    checks.push(Assertion::new(
        "interpolation_inequality",
        worst <= 1.0 + 1e-12,
        format!("max lhs/rhs over 500 fields = {worst:.15}"),
    ));
    Ok(checks)
}

fn semigroup() -> Result<Vec<Assertion>, HarnessError> {
    let mut checks = Vec::new();
    let g1 = Grid::interval(2.0, 64)?;
    let g2 = Grid::rectangle([1.0, 2.0], [32, 24])?;
    let mut mode_err: f64 = 0.0;
    for (grid, k) in [(g1, [3usize, 0]), (g2, [2, 5])] {
        let ext = grid.extents().to_vec();
        let dim = grid.dim();
        let f = Field::from_fn(grid, |x| {
            (0..dim).map(|a| (PI * k[a] as f64 * x[a] / ext[a]).cos()).product()
        })?;
        let lam: f64 = (0..dim).map(|a| (PI * k[a] as f64 / ext[a]).powi(2)).sum();
        for t in [1e-3, 0.05, 0.3] {
            let out = heat_propagate(&f, t)?;
            let exact = f.scale((-lam * t).exp());
            mode_err = mode_err.max(lr_norm(&out.sub(&exact)?, LpExponent::Infinity)?);
        }
    }
    checks.push(Assertion::new(
        "eigenmode_decay",
        mode_err <= 1e-12,
        format!("max error {mode_err:e}"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut law_err: f64 = 0.0;
    for _ in 0..20 {
        let f = Field::new(g2, (0..g2.len()).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        let (s, t) = (rng.random_range(0.0..0.05), rng.random_range(0.0..0.05));
        let a = heat_propagate(&heat_propagate(&f, s)?, t)?;
        let b = heat_propagate(&f, s + t)?;
        law_err = law_err.max(lr_norm(&a.sub(&b)?, LpExponent::Infinity)?);
    }
    checks.push(Assertion::new(
        "semigroup_law",
        law_err <= 1e-12,
        format!("max error {law_err:e}"),
    ));

    let grid = Grid::unit_interval(32)?;
    let t = 0.7;
    let c = 2.0;
    let constant = duhamel_solve(&Field::zeros(grid), |_| Field::constant(grid, c), t, 1024)?;
    let err_c = lr_norm(&constant.sub(&Field::constant(grid, c * (1.0 - (-t as f64).exp())))?, LpExponent::Infinity)?;
    let mode = Field::from_fn(grid, |x| (PI * x[0]).cos())?;
    let lam = PI * PI;
    let single = duhamel_solve(&Field::zeros(grid), |_| mode.clone(), t, 1024)?;
    let coeff = (1.0 - (-(1.0 + lam) * t).exp()) / (1.0 + lam);
    let err_m = lr_norm(&single.sub(&mode.scale(coeff))?, LpExponent::Infinity)?;
    checks.push(Assertion::new(
        "duhamel_closed_forms",
        err_c <= 1e-6 && err_m <= 1e-6,
        format!("constant source {err_c:e}, single mode {err_m:e}"),
    ));

    let errs: Vec<f64> = [32, 64]
        .iter()
        .map(|&m| {
            let z = duhamel_solve(&Field::zeros(grid), |_| mode.clone(), t, m)?;
            Ok(lr_norm(&z.sub(&mode.scale(coeff))?, LpExponent::Infinity)?)
        })
        .collect::<Result<_, HarnessError>>()?;
    let order = (errs[0] / errs[1]).log2();
    checks.push(Assertion::new(
        "duhamel_order",
        (1.8..=2.2).contains(&order),
        format!("observed order {order:.3}"),
    ));
    Ok(checks)
}

/// The three canned conservation runs: 1D Dirac, 1D two atoms, 2D Dirac on 128^2.
pub fn conservation_problems() -> Result<Vec<(&'static str, Problem)>, HarnessError> {
    let times: Vec<f64> = (1..=6).map(|k| 0.01 * k as f64).collect();
    let mk = |grid: Grid, measure: &str, eps: f64| -> Result<Problem, HarnessError> {
        let mut p = Problem::canned(grid, measure, "cosine", 1.0, 0.3, eps, 0.06)?;
        p.cfg = p.cfg.with_output_times(times.clone())?.with_max_dt(1e-3)?;
        Ok(p)
    };
    Ok(vec![
        ("dirac_1d", mk(Grid::unit_interval(512)?, "dirac", 1e-4)?),
        ("two_atoms_1d", mk(Grid::unit_interval(512)?, "two_atoms", 1e-4)?),
        ("dirac_2d", mk(Grid::rectangle([1.0, 1.0], [128, 128])?, "dirac", 1e-3)?),
    ])
}

fn conservation() -> Result<Vec<Assertion>, HarnessError> {
    conservation_problems()?
        .into_par_iter()
        .map(|(name, p)| {
            let traj = simulate(&p.cfg, &p.mu0, &p.v0)?;
            let drift = traj
                .mass_series
                .iter()
                .map(|m| (m - traj.mass).abs() / traj.mass)
                .fold(0.0, f64::max);
            let min_u = traj.min_u_series.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(Assertion::new(
                name,
                drift <= 1e-8 && min_u >= -1e-12,
                format!(
                    "{} snapshots, max relative drift {drift:e}, min u {min_u:e}",
                    traj.times.len()
                ),
            ))
        })
        .collect()
}

fn named(name: &str) -> Result<ExperimentReport, HarnessError> {
    run_experiment(name, &default_problem(name)?, &ExperimentParams::defaults_for(name)?)
}

fn summarize(report: &ExperimentReport, extra: Option<Assertion>) -> Vec<Assertion> {
    let mut out: Vec<Assertion> = report
        .assertions
        .iter()
        .map(|a| Assertion::new(format!("{}.{}", report.name, a.name), a.passed, a.detail.clone()))
        .collect();
    out.extend(extra);
    out
}

fn exponent_in(report: &ExperimentReport, lo: f64, hi: f64) -> Assertion {
    let e = report.fit.map_or(f64::NAN, |f| f.exponent);
    Assertion::new(
        format!("{}.exponent_in_range", report.name),
        e >= lo && e <= hi,
        format!("fitted {e:.4} in [{lo}, {hi}]"),
    )
}

fn rates_1d() -> Result<Vec<Assertion>, HarnessError> {
    let names = [
        "smoothing",
        "smoothing-control",
        "weak-star",
        "v-continuity",
        "taxis-integral",
        "gradient-uniformity",
        "eps-ladder",
    ];
    let reports: Vec<ExperimentReport> = names.par_iter().map(|n| named(n)).collect::<Result<_, _>>()?;
    let mut checks = Vec::new();
    for r in &reports {
        let extra = match r.name.as_str() {
            "smoothing" | "smoothing_control" => Some(exponent_in(r, -0.30, -0.20)),
            "weak_star" => Some(exponent_in(r, 0.4, f64::INFINITY)),
            "v_continuity" => Some(exponent_in(r, 0.25, f64::INFINITY)),
            "taxis_integral" => Some(exponent_in(r, 0.525, f64::INFINITY)),
            _ => None,
        };
        checks.extend(summarize(r, extra));
    }
    Ok(checks)
}

/// Unit Dirac mass at the center of the unit square on 128^2 cells.
pub fn dirac_2d(k_f: f64) -> Result<Problem, HarnessError> {
    Problem::canned(Grid::rectangle([1.0, 1.0], [128, 128])?, "dirac", "cosine", k_f, 0.3, 1e-5, 1.0)
}

fn rates_2d() -> Result<Vec<Assertion>, HarnessError> {
    let params = ExperimentParams {
        window: super::fit::Window::new(2e-3, 1.5e-2, 12)?,
        slack: 0.1,
        ..ExperimentParams::defaults_for("smoothing")?
    };
    let reports: Vec<ExperimentReport> = [0.0, 1.0]
        .par_iter()
        .map(|&k_f| {
            let mut rep = run_experiment("smoothing", &dirac_2d(k_f)?, &params)?;
            rep.name = format!("smoothing_2d_kf{k_f}");
            Ok(rep)
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(reports.iter().flat_map(|r| summarize(r, None)).collect())
}
