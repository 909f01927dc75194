//! Log-linear fits of Fourier-mode decay.

use serde::{Deserialize, Serialize};

use crate::diagnostics::series::DiagnosticsSeries;
use crate::error::{Error, Result};

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 10;
/// Amplitudes below this are treated as round-off.
pub const AMPLITUDE_NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `r` in `a(t) ≈ a₀ e^{−r t}`.
    pub rate: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
}

/// Least-squares fit of `ln a` against `t`.
pub fn fit_exponential(times: &[f64], amplitudes: &[f64]) -> Result<DecayFit> {
    if times.len() != amplitudes.len() {
        return Err(Error::DecayFit("time and amplitude lengths differ".into()));
    }
    let m = times.len();
    if m < MIN_FIT_SAMPLES {
        return Err(Error::DecayFit(format!(
            "window holds {m} samples, need at least {MIN_FIT_SAMPLES}"
        )));
    }
    if let Some(&a) = amplitudes.iter().find(|&&a| !(a >= AMPLITUDE_NOISE_FLOOR)) {
        return Err(Error::DecayFit(format!(
            "amplitude {a:e} is below the noise floor {AMPLITUDE_NOISE_FLOOR:e}"
        )));
    }
    if let Some(i) = (1..m).find(|&i| amplitudes[i] >= amplitudes[i - 1]) {
        return Err(Error::DecayFit(format!(
            "amplitude is not decreasing at t = {}",
            times[i]
        )));
    }
    let logs: Vec<f64> = amplitudes.iter().map(|a| a.ln()).collect();
    let mf = m as f64;
    let t_mean = times.iter().sum::<f64>() / mf;
    let y_mean = logs.iter().sum::<f64>() / mf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (t, y) in times.iter().zip(&logs) {
        let (dx, dy) = (t - t_mean, y - y_mean);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DecayFit("window has zero time extent".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;
    let ss_res: f64 = times
        .iter()
        .zip(&logs)
        .map(|(t, y)| {
            let r = y - (intercept + slope * t);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit {
        rate: -slope,
        log_intercept: intercept,
        r_squared,
        samples: m,
        t_start: times[0],
        t_end: times[m - 1],
    })
}

/// Fits the decay of mode `k` over rows with `t_a <= t <= t_b`.
pub fn fit_decay_rate(series: &DiagnosticsSeries, k: usize, window: (f64, f64)) -> Result<DecayFit> {
    if k > series.k_max() {
        return Err(Error::DecayFit(format!(
            "mode {k} is not recorded (k_max = {})",
            series.k_max()
        )));
    }
    let (t_a, t_b) = window;
    let (times, amps): (Vec<f64>, Vec<f64>) = series
        .rows()
        .iter()
        .filter(|r| r.t >= t_a && r.t <= t_b)
        .map(|r| (r.t, r.modes[k]))
        .unzip();
    fit_exponential(&times, &amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let a: Vec<f64> = t.iter().map(|t| (-3.0 * t).exp()).collect();
        let fit = fit_exponential(&t, &a).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-9);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert_eq!(fit.samples, 50);
    }

    #[test]
    fn rejects_bad_windows() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        assert!(fit_exponential(&t, &[1.0; 20]).is_err());
        assert!(fit_exponential(&t[..5], &[5.0, 4.0, 3.0, 2.0, 1.0]).is_err());
        let tiny: Vec<f64> = t.iter().map(|t| 1e-12 * (-t).exp()).collect();
        assert!(matches!(fit_exponential(&t, &tiny), Err(Error::DecayFit(_))));
    }
}
