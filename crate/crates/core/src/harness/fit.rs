use serde::Serialize;

use super::HarnessError;

pub const MIN_SAMPLES: usize = 5;

/// Least-squares line through `(log t, log value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

impl RateFit {
    pub fn predict(&self, t: f64) -> f64 {
        (self.intercept + self.exponent * t.ln()).exp()
    }
}

pub fn fit_decay_rate(times: &[f64], values: &[f64]) -> Result<RateFit, HarnessError> {
    if times.len() != values.len() {
        return Err(HarnessError::Length {
            times: times.len(),
            values: values.len(),
        });
    }
    if times.len() < MIN_SAMPLES {
        return Err(HarnessError::TooFewSamples {
            min: MIN_SAMPLES,
            got: times.len(),
        });
    }
    for (index, (&t, &value)) in times.iter().zip(values).enumerate() {
        if !(t > 0.0 && value > 0.0 && t.is_finite() && value.is_finite()) {
            return Err(HarnessError::Nonpositive { index, t, value });
        }
    }
    let n = times.len() as f64;
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::Degenerate);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    // a flat series is fitted perfectly by the zero slope
    let r_squared = if syy <= 1e-28 * n { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    let (t_min, t_max) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    Ok(RateFit {
        exponent: slope,
        intercept,
        r_squared,
        window: (t_min, t_max),
        samples: times.len(),
    })
}

/// `count` points from `t_min` to `t_max`, equally spaced in `log t`.
pub fn log_spaced(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![t_min];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..count)
        .map(|k| {
            if k == 0 {
                t_min
            } else if k + 1 == count {
                t_max
            } else {
                (a + (b - a) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Log-spaced sampling window for rate experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

impl Window {
    pub fn new(t_min: f64, t_max: f64, samples: usize) -> Result<Self, HarnessError> {
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
            return Err(HarnessError::Window(format!("need 0 < t_min < t_max, got [{t_min}, {t_max}]")));
        }
        if samples < MIN_SAMPLES {
            return Err(HarnessError::TooFewSamples {
                min: MIN_SAMPLES,
                got: samples,
            });
        }
        Ok(Self { t_min, t_max, samples })
    }

    /// `[4 eps, 0.1]` with 20 samples.
    pub fn default_for(eps: f64) -> Self {
        Self {
            t_min: 4.0 * eps,
            t_max: 0.1,
            samples: 20,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        log_spaced(self.t_min, self.t_max, self.samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_law() {
        let t = log_spaced(1e-4, 1e-1, 12);
        let v: Vec<f64> = t.iter().map(|t| t.powf(-0.25)).collect();
        let fit = fit_decay_rate(&t, &v).unwrap();
        assert!((fit.exponent + 0.25).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.window, (1e-4, 1e-1));
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let t = log_spaced(1e-3, 1.0, 8);
        let fit = fit_decay_rate(&t, &[2.5; 8]).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn noisy_square_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = log_spaced(1e-4, 1e-1, 20);
        let v: Vec<f64> = t
            .iter()
            .map(|t| t.sqrt() * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            .collect();
        let fit = fit_decay_rate(&t, &v).unwrap();
        assert!((fit.exponent - 0.5).abs() <= 0.02);
    }

    #[test]
    fn scaling_changes_only_the_intercept() {
        let t = log_spaced(1e-3, 1.0, 10);
        let v: Vec<f64> = t.iter().map(|t| t.powf(0.3) + t).collect();
        let a = fit_decay_rate(&t, &v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| 8.0 * x).collect();
        let b = fit_decay_rate(&t, &scaled).unwrap();
        assert_eq!(a.exponent, b.exponent);
        assert!((b.intercept - a.intercept - 8f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let t = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(matches!(
            fit_decay_rate(&t, &[1.0, 2.0, 0.0, 1.0, 1.0]),
            Err(HarnessError::Nonpositive { index: 2, .. })
        ));
        assert!(fit_decay_rate(&t[..4], &[1.0; 4]).is_err());
        assert!(fit_decay_rate(&t, &[1.0; 4]).is_err());
        assert!(matches!(fit_decay_rate(&[1.0; 5], &[1.0; 5]), Err(HarnessError::Degenerate)));
        assert!(Window::new(0.1, 0.01, 10).is_err());
    }
}
