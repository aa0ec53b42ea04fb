use rayon::prelude::*;

use super::fit::{fit_decay_rate, Window};
use super::problems::Problem;
use super::report::ExperimentReport;
use super::HarnessError;
use crate::domain::{gradient, integrate, lr_norm, w1q_distance, Field, LpExponent};
use crate::measure::{weak_star_gap, TestFunction};
use crate::model::{admissible_q_interval, alpha_clamp, decay_plan};
use crate::solver::{SimConfig, SimState, Simulation};

/// Steps per sampling interval, at least.
const SUBSTEPS: usize = 40;

/// Advances `sim` through `times`, capping each step at a fraction of the
/// current sampling interval; `on_sample` sees the simulation at each time.
fn drive(
    sim: &mut Simulation,
    times: &[f64],
    mut on_step: impl FnMut(&SimState, f64),
    mut on_sample: impl FnMut(&Simulation) -> Result<(), HarnessError>,
    stats: &mut RunStats,
) -> Result<(), HarnessError> {
    let global_cap = sim.config().max_dt;
    let mut prev = sim.state().t;
    for &t in times {
        sim.set_max_dt(((t - prev) / SUBSTEPS as f64).min(global_cap).max(f64::MIN_POSITIVE))?;
        sim.advance_to(t, &mut on_step)?;
        sim.check_invariants()?;
        stats.observe(sim);
        on_sample(sim)?;
        prev = t;
    }
    Ok(())
}

#[derive(Debug, Default)]
struct RunStats {
    max_drift: f64,
    min_u: f64,
    min_v: f64,
    steps: usize,
}

impl RunStats {
    fn observe(&mut self, sim: &Simulation) {
        self.max_drift = self.max_drift.max(sim.mass_drift());
        self.min_u = self.min_u.min(sim.state().u.min());
        self.min_v = self.min_v.min(sim.state().v.min());
        self.steps = sim.steps();
    }

    fn record(&self, report: &mut ExperimentReport) {
        report.set("max_mass_drift", self.max_drift);
        report.set("min_u", self.min_u);
        report.set("min_v", self.min_v);
        report.set("steps", self.steps as f64);
        report.assert(
            "solver_invariants",
            true,
            format!(
                "relative mass drift <= {:e}, min u = {:e}, min v = {:e}",
                self.max_drift, self.min_u, self.min_v
            ),
        );
    }
}

fn configure(problem: &Problem, window: &Window) -> Result<(SimConfig, Vec<f64>), HarnessError> {
    let times = window.times();
    let mut cfg = problem.cfg.clone();
    cfg.t_end = window.t_max;
    cfg.output_times = times.clone();
    cfg.validate()?;
    Ok((cfg, times))
}

fn start(problem: &Problem, window: &Window) -> Result<(Simulation, Vec<f64>), HarnessError> {
    let (cfg, times) = configure(problem, window)?;
    Ok((Simulation::new(cfg, &problem.mu0, &problem.v0)?, times))
}

fn fit_rows(report: &mut ExperimentReport) -> Result<(), HarnessError> {
    let t = report.column(0);
    let y = report.column(1);
    report.fit = Some(fit_decay_rate(&t, &y)?);
    Ok(())
}

/// `||u(t)||_{L^r}` on the window with a log-log fit. The prediction is
/// `-(n/2)(1 - 1/gamma)` from the decay plan for `(n, alpha, q, r)`, or `0`
/// for `r = 1`. Asserts the fit lies within `slack` of the prediction and
/// reports `sup_t t^{-predicted} ||u(t)||_{L^r}`.
pub fn smoothing_experiment(
    problem: &Problem,
    r: LpExponent,
    q: f64,
    window: &Window,
    slack: f64,
) -> Result<ExperimentReport, HarnessError> {
    let n = problem.dim();
    let predicted = if r == LpExponent::Finite(1.0) {
        0.0
    } else {
        decay_plan(n, problem.cfg.sens.alpha(), q, r)?.predicted_exponent
    };
    let mut report = ExperimentReport::new("smoothing", &["t", "lr_norm", "scaled_norm"]);
    report.predicted_exponent = Some(predicted);
    let (mut sim, times) = start(problem, window)?;
    let mut stats = RunStats::default();
    let mut rows = Vec::new();
    drive(
        &mut sim,
        &times,
        |_, _| {},
        |s| {
            let t = s.state().t;
            let norm = lr_norm(&s.state().u, r)?;
            rows.push(vec![t, norm, t.powf(-predicted) * norm]);
            Ok(())
        },
        &mut stats,
    )?;
    report.rows = rows;
    stats.record(&mut report);
    fit_rows(&mut report)?;
    let fit = report.fit.expect("fitted");
    let sup = report.column(2).into_iter().fold(0.0, f64::max);
    report.set("r", r.to_f64());
    report.set("scaled_sup", sup);
    report.assert(
        "exponent_within_slack",
        (fit.exponent - predicted).abs() <= slack,
        format!("fitted {:.4}, predicted {:.4}, slack {slack}", fit.exponent, predicted),
    );
    report.assert(
        "scaled_sup_finite",
        sup.is_finite(),
        format!("sup t^{{{:.4}}} ||u||_r = {sup:.6}", -predicted),
    );
    Ok(report)
}

/// `max_phi |int u(t) phi - mu0(phi)|` on the window. Asserts the gap
/// shrinks as `t` decreases and, when the gap is nonzero, that the fitted
/// growth exponent is at least `1 - (n/2)(1 - 1/r) - slack`.
pub fn weak_star_experiment(
    problem: &Problem,
    dictionary: &[TestFunction],
    r: LpExponent,
    window: &Window,
    slack: f64,
) -> Result<ExperimentReport, HarnessError> {
    let n = problem.dim() as f64;
    let predicted = 1.0 - 0.5 * n * (1.0 - r.recip());
    let mut report = ExperimentReport::new("weak_star", &["t", "gap"]);
    report.predicted_exponent = Some(predicted);
    let (mut sim, times) = start(problem, window)?;
    let mut stats = RunStats::default();
    let mut rows = Vec::new();
    drive(
        &mut sim,
        &times,
        |_, _| {},
        |s| {
            rows.push(vec![s.state().t, weak_star_gap(&s.state().u, &problem.mu0, dictionary)?]);
            Ok(())
        },
        &mut stats,
    )?;
    report.rows = rows;
    stats.record(&mut report);
    let gaps = report.column(1);
    let floor = 1e-12 * problem.mu0.total_mass();
    let monotone = gaps.windows(2).all(|w| w[0] <= w[1] + floor);
    report.assert(
        "gap_shrinks_as_t_decreases",
        monotone,
        format!("gap from {:e} at t_min to {:e} at t_max", gaps[0], gaps[gaps.len() - 1]),
    );
    if gaps.iter().all(|g| *g <= floor) {
        report.assert("gap_vanishes", true, format!("all gaps <= {floor:e}"));
        return Ok(report);
    }
    fit_rows(&mut report)?;
    let fit = report.fit.expect("fitted");
    report.assert(
        "growth_exponent_at_least_bound",
        fit.exponent >= predicted - slack,
        format!("fitted {:.4} >= {:.4} - {slack}", fit.exponent, predicted),
    );
    Ok(report)
}

/// `||v(t) - v0||_{W^{1,q}}` on the window. The prediction is the slowest
/// term `1/2 - (n/2)(1 - 1/q)`.
pub fn v_continuity_experiment(
    problem: &Problem,
    q: f64,
    window: &Window,
    slack: f64,
) -> Result<ExperimentReport, HarnessError> {
    let n = problem.dim();
    let qi = admissible_q_interval(n, problem.cfg.sens.alpha())?;
    if !qi.contains(q) {
        return Err(HarnessError::Input(format!("q = {q} outside {qi}")));
    }
    let predicted = 0.5 - 0.5 * n as f64 * (1.0 - 1.0 / q);
    let mut report = ExperimentReport::new("v_continuity", &["t", "w1q_distance"]);
    report.predicted_exponent = Some(predicted);
    let (mut sim, times) = start(problem, window)?;
    report.set("initial_floor", w1q_distance(&sim.state().v, &problem.v0, q)?);
    let mut stats = RunStats::default();
    let mut rows = Vec::new();
    drive(
        &mut sim,
        &times,
        |_, _| {},
        |s| {
            rows.push(vec![s.state().t, w1q_distance(&s.state().v, &problem.v0, q)?]);
            Ok(())
        },
        &mut stats,
    )?;
    report.rows = rows;
    stats.record(&mut report);
    let d = report.column(1);
    report.assert(
        "decays_as_t_decreases",
        d[0] < d[d.len() - 1],
        format!("d(t_min) = {:e}, d(t_max) = {:e}", d[0], d[d.len() - 1]),
    );
    fit_rows(&mut report)?;
    let fit = report.fit.expect("fitted");
    report.assert(
        "exponent_at_least_bound",
        fit.exponent >= predicted - slack,
        format!("fitted {:.4} >= {:.4} - {slack}", fit.exponent, predicted),
    );
    Ok(report)
}

fn taxis_density(state: &SimState, power: f64) -> f64 {
    let g = gradient(&state.v).magnitude();
    let integrand = state
        .u
        .zip_map(&g, |u, gm| u * gm.powf(power))
        .expect("fields share the grid");
    integrate(&integrand)
}

/// `I(t) = int_0^t ||u |grad v|^{1 - 2 alpha_eff}||_{L^1}`, accumulated with
/// the trapezoidal rule over solver steps. Asserts the growth exponent is at
/// least `1 - (n/2)(1 - 1/r) - slack`.
pub fn taxis_integral_experiment(
    problem: &Problem,
    r: LpExponent,
    window: &Window,
    slack: f64,
) -> Result<ExperimentReport, HarnessError> {
    let n = problem.dim() as f64;
    let alpha_eff = alpha_clamp(problem.cfg.sens.alpha());
    if !(alpha_eff < 0.5) {
        return Err(HarnessError::Input(format!("alpha_eff = {alpha_eff} must be below 1/2")));
    }
    let power = 1.0 - 2.0 * alpha_eff;
    let predicted = 1.0 - 0.5 * n * (1.0 - r.recip());
    let mut report = ExperimentReport::new("taxis_integral", &["t", "integral"]);
    report.predicted_exponent = Some(predicted);
    let (mut sim, times) = start(problem, window)?;
    let mut stats = RunStats::default();
    let mut integral = 0.0;
    let mut last = taxis_density(sim.state(), power);
    let mut rows = Vec::new();
    let acc = std::cell::Cell::new(0.0);
    drive(
        &mut sim,
        &times,
        |s, dt| {
            let now = taxis_density(s, power);
            integral += 0.5 * dt * (last + now);
            last = now;
            acc.set(integral);
        },
        |s| {
            rows.push(vec![s.state().t, acc.get()]);
            Ok(())
        },
        &mut stats,
    )?;
    report.rows = rows;
    stats.record(&mut report);
    report.set("alpha_eff", alpha_eff);
    fit_rows(&mut report)?;
    let fit = report.fit.expect("fitted");
    report.assert(
        "growth_exponent_at_least_bound",
        fit.exponent >= predicted - slack,
        format!("fitted {:.4} >= {:.4} - {slack}", fit.exponent, predicted),
    );
    Ok(report)
}

/// `||grad v(t)||_{L^p}` on the window. Reports the sup and compares the
/// mean over the last decade of the window with the mean over the first;
/// the growth check is asserted only for `p <= q`.
pub fn gradient_uniformity_check(
    problem: &Problem,
    p: f64,
    q: f64,
    window: &Window,
) -> Result<ExperimentReport, HarnessError> {
    if !(p >= 1.0) {
        return Err(HarnessError::Input(format!("p = {p} must be at least 1")));
    }
    let mut report = ExperimentReport::new("gradient_uniformity", &["t", "grad_v_lp"]);
    let (mut sim, times) = start(problem, window)?;
    let mut stats = RunStats::default();
    let mut rows = Vec::new();
    drive(
        &mut sim,
        &times,
        |_, _| {},
        |s| {
            let g = gradient(&s.state().v).magnitude();
            rows.push(vec![s.state().t, lr_norm(&g, p)?]);
            Ok(())
        },
        &mut stats,
    )?;
    report.rows = rows;
    stats.record(&mut report);
    let t = report.column(0);
    let g = report.column(1);
    let mean_where = |pred: &dyn Fn(f64) -> bool| {
        let sel: Vec<f64> = t.iter().zip(&g).filter(|(t, _)| pred(**t)).map(|(_, g)| *g).collect();
        sel.iter().sum::<f64>() / sel.len().max(1) as f64
    };
    let first = mean_where(&|s| s <= 10.0 * window.t_min);
    let last = mean_where(&|s| s >= window.t_max / 10.0);
    let sup = g.iter().cloned().fold(0.0, f64::max);
    report.set("sup", sup);
    report.set("first_decade_mean", first);
    report.set("last_decade_mean", last);
    report.assert("sup_finite", sup.is_finite(), format!("sup ||grad v||_p = {sup:.6}"));
    if p <= q {
        report.assert(
            "no_growth_trend",
            last <= 2.0 * first,
            format!("last-decade mean {last:.6} <= 2 x first-decade mean {first:.6}"),
        );
    }
    Ok(report)
}

/// Runs the problem for every `eps` (concurrently) to `t_final` and
/// measures consecutive-rung distances `||u_k - u_{k+1}||_{L^1}` and
/// `||v_k - v_{k+1}||_{W^{1,q}}`. Asserts each distance is at most `1.2`
/// times the previous one.
pub fn eps_ladder(problem: &Problem, eps: &[f64], q: f64, t_final: f64) -> Result<ExperimentReport, HarnessError> {
    if eps.len() < 2 {
        return Err(HarnessError::Input("eps ladder needs at least two rungs".into()));
    }
    if eps.windows(2).any(|w| w[1] > w[0]) {
        return Err(HarnessError::Input("eps list must be nonincreasing".into()));
    }
    let finals: Vec<Result<(Field, Field, f64), HarnessError>> = eps
        .par_iter()
        .map(|&e| {
            let mut cfg = problem.cfg.clone();
            cfg.eps = e;
            cfg.t_end = t_final;
            cfg.output_times = vec![t_final];
            cfg.max_dt = cfg.max_dt.min(t_final / 200.0);
            cfg.validate()?;
            let mut sim = Simulation::new(cfg, &problem.mu0, &problem.v0)?;
            sim.advance_to(t_final, |_, _| {})?;
            sim.check_invariants()?;
            Ok((sim.state().u.clone(), sim.state().v.clone(), sim.mass_drift()))
        })
        .collect();
    let finals = finals.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut report = ExperimentReport::new("eps_ladder", &["eps", "u_l1_distance", "v_w1q_distance"]);
    for k in 0..eps.len() - 1 {
        let du = lr_norm(&finals[k].0.sub(&finals[k + 1].0)?, 1.0)?;
        let dv = w1q_distance(&finals[k].1, &finals[k + 1].1, q)?;
        report.rows.push(vec![eps[k + 1], du, dv]);
    }
    let drift = finals.iter().map(|f| f.2).fold(0.0, f64::max);
    report.set("max_mass_drift", drift);
    report.set("t_final", t_final);
    for (col, name) in [(1, "u"), (2, "v")] {
        let d = report.column(col);
        let within = d.windows(2).all(|w| w[1] <= 1.2 * w[0]);
        let strict = d.windows(2).all(|w| w[1] < w[0]);
        report.set(&format!("{name}_strictly_decreasing"), if strict { 1.0 } else { 0.0 });
        report.assert(
            &format!("{name}_distances_decrease"),
            within,
            format!("{d:?} (strict: {strict})"),
        );
    }
    Ok(report)
}
