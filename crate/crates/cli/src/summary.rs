//! The `summary.json` record of a run.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use hypflow_core::diagnostics::monitor::SufficientCondition;
use hypflow_core::flow::run::recenter_fully;
use hypflow_core::{
    fit_exponential, linear_model, monotonicity_report, summarize, DecayFit, GeometricSummary,
    LinearizedModel, Mode, MonotonicityReport, RunOutcome, StopReason, WMonitorStats,
};

/// Modes whose decay is fitted in the summary.
pub const FITTED_MODES: [usize; 2] = [2, 3];
/// Mode amplitudes below this are too close to round-off for an automatic fit window.
const MODE_FLOOR: f64 = 1e-10;
/// The deficit is a difference of squares and reaches round-off sooner.
const DEFICIT_FLOOR: f64 = 1e-8;
/// Rows are thinned to about this many evenly spaced times before choosing a window.
const FIT_GRID: usize = 200;

pub fn exit_code(reason: StopReason) -> i32 {
    match reason {
        StopReason::Converged | StopReason::ReachedTEnd => 0,
        StopReason::CurvatureBlowUp => 2,
        StopReason::ConvexityLost => 3,
        StopReason::StepUnderflow => 4,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub predicted_rho_inf: f64,
    /// Mean radius of the final curve after moving the pole to its centre.
    pub achieved_rho_inf: f64,
    pub rho_inf_error: f64,
    pub predicted_length: f64,
    pub predicted_area: f64,
    pub length_rel_error: f64,
    pub area_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// Fourier mode, or `None` for the isoperimetric deficit.
    pub mode: Option<usize>,
    pub predicted_rate: f64,
    pub fit: Option<DecayFit>,
    pub rel_error: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub max_rel_area_drift: f64,
    pub max_rel_length_drift: f64,
    pub max_gauss_bonnet_residual: f64,
    pub min_chebyshev_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// `min(min κ(0), 1)`.
    pub kappa_floor: f64,
    pub min_kappa: f64,
    pub preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub constants: SufficientCondition,
    /// Fraction of recorded rows with `min V <= D <= max V`.
    pub crossing_fraction: f64,
    pub min_v_min: f64,
    pub final_v_min_above_quarter_d: bool,
    pub final_eta_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub reason: StopReason,
    pub exit_code: i32,
    pub failure: Option<String>,
    pub blowup_time: Option<f64>,
    pub alpha: f64,
    pub mode: Mode,
    pub n: usize,
    pub t_start: f64,
    pub t_final: f64,
    pub steps: u64,
    pub initial: GeometricSummary,
    #[serde(rename = "final")]
    pub final_summary: GeometricSummary,
    pub limit: LimitReport,
    pub linear_model: LinearizedModel,
    pub decay: Vec<DecayReport>,
    pub monotonicity: MonotonicityReport,
    pub conservation: ConservationReport,
    pub convexity: ConvexityReport,
    pub w_monitor: WMonitorStats,
    pub sufficient_condition: MonitorReport,
    pub recenterings: usize,
    pub recenter_failures: u64,
}

/// Longest strictly decreasing run of values above `floor` that ends at the last
/// such value, trimmed to its second half to skip transients.
fn auto_window(values: &[f64], floor: f64) -> Option<(usize, usize)> {
    let end = values.iter().rposition(|&v| v >= floor)?;
    let mut start = end;
    while start > 0 && values[start - 1] > values[start] && values[start - 1] >= floor {
        start -= 1;
    }
    Some((start + (end - start) / 2, end))
}

/// Indices of the first row at or after each of `FIT_GRID + 1` evenly spaced times.
fn thin(times: &[f64]) -> Vec<usize> {
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let mut picked: Vec<usize> = (0..=FIT_GRID)
        .filter_map(|i| {
            let t = t0 + (t1 - t0) * i as f64 / FIT_GRID as f64;
            times.iter().position(|&s| s >= t)
        })
        .collect();
    picked.dedup();
    picked
}

fn decay_report(
    times: &[f64],
    values: &[f64],
    floor: f64,
    mode: Option<usize>,
    predicted: f64,
) -> DecayReport {
    let idx = thin(times);
    let t: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
    let v: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
    let fitted = match auto_window(&v, floor) {
        Some((a, b)) => fit_exponential(&t[a..=b], &v[a..=b]).map_err(|e| e.to_string()),
        None => Err("no samples above the fit floor".to_string()),
    };
    match fitted {
        Ok(fit) => DecayReport {
            mode,
            predicted_rate: predicted,
            rel_error: Some((fit.rate - predicted).abs() / predicted.abs()),
            fit: Some(fit),
            note: None,
        },
        Err(note) => DecayReport {
            mode,
            predicted_rate: predicted,
            fit: None,
            rel_error: None,
            note: Some(note),
        },
    }
}

pub fn build_summary(outcome: &RunOutcome, alpha: f64, mode: Mode) -> hypflow_core::Result<RunSummary> {
    let rows = outcome.series.rows();
    let first = rows.first().expect("runs record at least one row");
    let reference = &outcome.reference;
    let rho_inf = reference.limit_radius(mode)?;
    let model = linear_model(alpha, rho_inf)?;

    let final_curve = &outcome.final_state.curve;
    let centred = recenter_fully(final_curve, 1e-13, 16);
    let achieved = centred.interpolant().mean();
    let final_summary = summarize(final_curve);
    let predicted_length = 2.0 * PI * rho_inf.sinh();
    let predicted_area = 2.0 * PI * (rho_inf.cosh() - 1.0);

    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let mut decay: Vec<DecayReport> = FITTED_MODES
        .iter()
        .filter(|&&k| k <= outcome.series.k_max())
        .map(|&k| {
            let amps: Vec<f64> = rows.iter().map(|r| r.modes[k]).collect();
            decay_report(&times, &amps, MODE_FLOOR, Some(k), model.lambda(k))
        })
        .collect();
    // The deficit is quadratic in the perturbation and independent of the pole.
    let deficits: Vec<f64> = rows.iter().map(|r| r.deficit).collect();
    decay.push(decay_report(&times, &deficits, DEFICIT_FLOOR, None, 2.0 * model.lambda(2)));

    let drift = |get: fn(&hypflow_core::SeriesRow) -> f64| {
        let q0 = get(first);
        rows.iter()
            .map(|r| ((get(r) - q0) / q0).abs())
            .fold(0.0, f64::max)
    };
    let kappa_floor = first.kappa_min.min(1.0);
    let min_kappa = rows.iter().map(|r| r.kappa_min).fold(f64::INFINITY, f64::min);
    let constants = reference.sufficient_condition(mode)?;
    let crossings = outcome.monitor.iter().filter(|m| m.crossing).count();
    let last_monitor = outcome.monitor.last().expect("one sample per row");

    let reason = outcome.reason;
    Ok(RunSummary {
        reason,
        exit_code: exit_code(reason),
        failure: outcome.failure.as_ref().map(|e| e.to_string()),
        blowup_time: (reason == StopReason::CurvatureBlowUp).then_some(outcome.final_state.t),
        alpha,
        mode,
        n: final_curve.len(),
        t_start: first.t,
        t_final: outcome.final_state.t,
        steps: outcome.final_state.step_count,
        initial: summarize(&outcome.snapshots[0].curve),
        limit: LimitReport {
            predicted_rho_inf: rho_inf,
            achieved_rho_inf: achieved,
            rho_inf_error: (achieved - rho_inf).abs(),
            predicted_length,
            predicted_area,
            length_rel_error: (final_summary.length - predicted_length).abs() / predicted_length,
            area_rel_error: (final_summary.area - predicted_area).abs() / predicted_area,
        },
        final_summary,
        linear_model: model,
        decay,
        monotonicity: monotonicity_report(&outcome.series, mode),
        conservation: ConservationReport {
            max_rel_area_drift: drift(|r| r.area),
            max_rel_length_drift: drift(|r| r.length),
            max_gauss_bonnet_residual: rows
                .iter()
                .map(|r| r.gb_residual.abs() / (2.0 * PI + r.area))
                .fold(0.0, f64::max),
            min_chebyshev_gap: rows.iter().map(|r| r.cheb_gap).fold(f64::INFINITY, f64::min),
        },
        convexity: ConvexityReport {
            kappa_floor,
            min_kappa,
            preserved: min_kappa >= kappa_floor - 1e-6,
        },
        w_monitor: outcome.w_monitor,
        sufficient_condition: MonitorReport {
            constants,
            crossing_fraction: crossings as f64 / outcome.monitor.len() as f64,
            min_v_min: outcome.monitor.iter().map(|m| m.v_min).fold(f64::INFINITY, f64::min),
            final_v_min_above_quarter_d: last_monitor.v_min_above_quarter_d,
            final_eta_measure: last_monitor.eta_measure,
        },
        recenterings: outcome.recenterings.len(),
        recenter_failures: outcome.recenter_failures,
    })
}
