//! Driver loop: stepping, recording, recentering and termination.

use serde::{Deserialize, Serialize};

use crate::diagnostics::linear::limit_radius;
use crate::diagnostics::monitor::{MonitorSample, SufficientCondition};
use crate::diagnostics::series::{observe, DiagnosticsSeries, SeriesRow};
use crate::error::{Error, Result};
use crate::flow::config::{FlowConfig, Mode};
use crate::flow::engine::{FlowEngine, FlowState};
use crate::flow::recenter::{first_harmonic_drift, recenter, trigger_ratio};
use crate::geometry::{deficit, summarize, CurveFields, RadialCurve};

/// Accepted steps over which the summaries must be stationary before declaring
/// convergence.
pub const STATIONARY_WINDOW: usize = 10;
/// Relative change of `L` and `A` allowed inside the stationarity window.
pub const STATIONARY_TOLERANCE: f64 = 1e-12;
/// Recentering is skipped while the first harmonic is below this fraction of mean `ρ`.
pub const RECENTER_MIN_DRIFT: f64 = 1e-3;
/// Slack on the step-to-step growth of `W_max`.
pub const W_MONITOR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Converged,
    ReachedTEnd,
    CurvatureBlowUp,
    ConvexityLost,
    StepUnderflow,
}

impl StopReason {
    pub fn is_success(&self) -> bool {
        matches!(self, StopReason::Converged | StopReason::ReachedTEnd)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub t: f64,
    pub curve: RadialCurve,
}

/// Quantities fixed by the initial curve of a run, carried across resumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedReference {
    pub initial_area: f64,
    pub initial_length: f64,
    pub initial_deficit: f64,
    pub initial_kappa_min: f64,
}

impl ConservedReference {
    pub fn from_curve(curve: &RadialCurve) -> Self {
        let s = summarize(curve);
        Self {
            initial_area: s.area,
            initial_length: s.length,
            initial_deficit: s.deficit,
            initial_kappa_min: s.kappa_min,
        }
    }

    pub fn limit_radius(&self, mode: Mode) -> Result<f64> {
        limit_radius(
            mode,
            match mode {
                Mode::AreaPreserving => self.initial_area,
                Mode::LengthPreserving => self.initial_length,
            },
        )
    }

    pub fn sufficient_condition(&self, mode: Mode) -> Result<SufficientCondition> {
        Ok(SufficientCondition::new(
            self.initial_kappa_min,
            self.limit_radius(mode)?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecenterEvent {
    pub step: u64,
    pub t: f64,
    pub shift: f64,
    pub direction: f64,
    pub retries: usize,
}

/// Steps on which `φ < κ^α` held where `W = κ + 1/κ` peaks, and how often `W_max` grew.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WMonitorStats {
    pub applicable_steps: u64,
    pub violations: u64,
    pub max_excess: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reason: StopReason,
    pub final_state: FlowState,
    pub series: DiagnosticsSeries,
    /// One entry per series row.
    pub monitor: Vec<MonitorSample>,
    pub snapshots: Vec<Snapshot>,
    pub recenterings: Vec<RecenterEvent>,
    pub recenter_failures: u64,
    pub w_monitor: WMonitorStats,
    /// Error that ended a failed run.
    pub failure: Option<Error>,
    pub reference: ConservedReference,
}

pub fn run(config: &FlowConfig, initial: RadialCurve) -> Result<RunOutcome> {
    let reference = ConservedReference::from_curve(&initial);
    resume(config, 0.0, 0, initial, reference)
}

/// Continues a run from `curve` at time `t0`, with the reference quantities of the
/// original initial curve.
pub fn resume(
    config: &FlowConfig,
    t0: f64,
    step0: u64,
    curve: RadialCurve,
    reference: ConservedReference,
) -> Result<RunOutcome> {
    Runner::new(FlowEngine::new(config.clone())?, reference)?.run(curve, t0, step0)
}

/// Same as [`run`] with a caller-built engine.
pub fn run_with_engine(engine: FlowEngine, initial: RadialCurve) -> Result<RunOutcome> {
    let reference = ConservedReference::from_curve(&initial);
    Runner::new(engine, reference)?.run(initial, 0.0, 0)
}

struct Runner {
    engine: FlowEngine,
    reference: ConservedReference,
    d: f64,
    series: DiagnosticsSeries,
    monitor: Vec<MonitorSample>,
    snapshots: Vec<Snapshot>,
    recenterings: Vec<RecenterEvent>,
    recenter_failures: u64,
    w_monitor: WMonitorStats,
}

impl Runner {
    fn new(engine: FlowEngine, reference: ConservedReference) -> Result<Self> {
        let config = engine.config();
        let d = reference.limit_radius(config.mode)?;
        let k_max = config.k_max;
        Ok(Self {
            engine,
            reference,
            d,
            series: DiagnosticsSeries::new(k_max),
            monitor: Vec::new(),
            snapshots: Vec::new(),
            recenterings: Vec::new(),
            recenter_failures: 0,
            w_monitor: WMonitorStats::default(),
        })
    }

    fn record(&mut self, state: &FlowState) -> Result<SeriesRow> {
        let (row, sample) = observe(state, self.engine.config(), self.d)?;
        self.series.push(row.clone())?;
        self.monitor.push(sample);
        Ok(row)
    }

    fn snapshot(&mut self, state: &FlowState) {
        if self.snapshots.last().map(|s| s.t) != Some(state.t) {
            self.snapshots.push(Snapshot {
                step: state.step_count,
                t: state.t,
                curve: state.curve.clone(),
            });
        }
    }

    fn converged(&self, row: &SeriesRow) -> bool {
        let threshold = self.engine.config().convergence_deficit;
        if !(self.reference.initial_deficit > threshold && row.deficit < threshold) {
            return false;
        }
        let rows = self.series.rows();
        if rows.len() <= STATIONARY_WINDOW {
            return false;
        }
        let window = &rows[rows.len() - STATIONARY_WINDOW - 1..];
        let stationary = |get: fn(&SeriesRow) -> f64| {
            let (lo, hi) = window
                .iter()
                .map(get)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            hi - lo <= STATIONARY_TOLERANCE * hi.abs()
        };
        stationary(|r| r.length) && stationary(|r| r.area)
    }

    fn maybe_recenter(&mut self, state: FlowState) -> FlowState {
        let config = self.engine.config();
        let fields = CurveFields::new(&state.curve);
        if trigger_ratio(&fields) <= config.recenter_trigger {
            return state;
        }
        let (amplitude, _) = first_harmonic_drift(&state.curve);
        let mean = state.curve.interpolant().mean();
        if amplitude <= RECENTER_MIN_DRIFT * mean {
            return state;
        }
        let moved = match recenter(&state.curve) {
            Ok(r) => r,
            Err(_) => {
                self.recenter_failures += 1;
                return state;
            }
        };
        match self
            .engine
            .state_at(moved.curve, state.t, state.step_count)
        {
            Ok(next) => {
                self.recenterings.push(RecenterEvent {
                    step: state.step_count,
                    t: state.t,
                    shift: moved.shift,
                    direction: moved.direction,
                    retries: moved.retries,
                });
                next
            }
            Err(_) => {
                self.recenter_failures += 1;
                state
            }
        }
    }

    /// Whether `φ < κ^α` at the sample where `W` peaks.
    fn w_condition(&self, state: &FlowState) -> bool {
        let alpha = self.engine.config().alpha;
        let (j, _) = state
            .kappa
            .iter()
            .map(|&k| k + 1.0 / k)
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty curve");
        state.phi < state.kappa[j].powf(alpha)
    }

    fn run(mut self, curve: RadialCurve, t0: f64, step0: u64) -> Result<RunOutcome> {
        let config = self.engine.config().clone();
        let mut state = self.engine.state_at(curve, t0, step0)?;
        let mut row = self.record(&state)?;
        self.snapshot(&state);
        let mut next_snapshot = (t0 / config.snapshot_interval).floor() + 1.0;

        let (reason, failure) = loop {
            if state.t >= config.t_end {
                break (StopReason::ReachedTEnd, None);
            }
            if self.converged(&row) {
                break (StopReason::Converged, None);
            }
            state = self.maybe_recenter(state);
            let dt = match self.engine.adaptive_dt(&state) {
                Ok(dt) => dt,
                Err(e) => break (StopReason::StepUnderflow, Some(e)),
            };
            let w_applies = self.w_condition(&state);
            let mut next = match self.engine.step(&state, dt) {
                Ok(next) => next,
                Err(e) => {
                    let reason = match e {
                        Error::CurvatureBlowUp { .. } => StopReason::CurvatureBlowUp,
                        Error::StepUnderflow(_) => StopReason::StepUnderflow,
                        _ => StopReason::ConvexityLost,
                    };
                    break (reason, Some(e));
                }
            };
            if config.t_end - next.t <= 1e-13 * config.t_end.max(1.0) {
                next.t = config.t_end;
            }
            state = next;
            let prev_w = row.w_max;
            row = self.record(&state)?;
            if w_applies {
                self.w_monitor.applicable_steps += 1;
                let excess = row.w_max - prev_w;
                if excess > W_MONITOR_TOLERANCE * prev_w.max(1.0) {
                    self.w_monitor.violations += 1;
                }
                self.w_monitor.max_excess = self.w_monitor.max_excess.max(excess);
            }
            if state.t >= next_snapshot * config.snapshot_interval {
                self.snapshot(&state);
                next_snapshot = (state.t / config.snapshot_interval).floor() + 1.0;
            }
        };
        self.snapshot(&state);

        Ok(RunOutcome {
            reason,
            final_state: state,
            series: self.series,
            monitor: self.monitor,
            snapshots: self.snapshots,
            recenterings: self.recenterings,
            recenter_failures: self.recenter_failures,
            w_monitor: self.w_monitor,
            failure,
            reference: self.reference,
        })
    }
}

/// Recenters until the first harmonic is below `tol` or no further progress is made.
pub fn recenter_fully(curve: &RadialCurve, tol: f64, max_calls: usize) -> RadialCurve {
    let mut current = curve.clone();
    for _ in 0..max_calls {
        let (amplitude, _) = first_harmonic_drift(&current);
        if amplitude < tol {
            break;
        }
        match recenter(&current) {
            Ok(r) => current = r.curve,
            Err(_) => break,
        }
    }
    current
}

/// Whether the run's final deficit is consistent with its recorded length and area.
pub fn final_deficit(outcome: &RunOutcome) -> f64 {
    let row = outcome.series.last().expect("runs record at least one row");
    deficit(row.length, row.area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_reaches_t_end_unchanged() {
        for mode in [Mode::AreaPreserving, Mode::LengthPreserving] {
            let config = FlowConfig::new(-1.0, mode, 64).unwrap().with_t_end(0.5);
            let out = run(&config, RadialCurve::circle(64, 1.0).unwrap()).unwrap();
            assert_eq!(out.reason, StopReason::ReachedTEnd);
            assert_eq!(out.final_state.t, 0.5);
            assert!(out
                .final_state
                .curve
                .rho()
                .iter()
                .all(|r| (r - 1.0).abs() < 1e-12));
            assert!(out.recenterings.is_empty());
            assert_eq!(out.series.len() as u64, out.final_state.step_count + 1);
        }
    }

    #[test]
    fn snapshots_at_start_interval_and_end() {
        let mut config = FlowConfig::new(-1.0, Mode::AreaPreserving, 32).unwrap();
        config.t_end = 0.25;
        config.snapshot_interval = 0.1;
        let out = run(&config, RadialCurve::circle(32, 1.0).unwrap()).unwrap();
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 4, "{times:?}");
        assert_eq!(times[0], 0.0);
        // Snapshots land on the first accepted step past each multiple of the interval.
        let dt = 0.2 * (2.0 * std::f64::consts::PI / 32.0).powi(2) * 1f64.cosh().powi(2);
        assert!(times[1] >= 0.1 && times[1] < 0.1 + dt, "{times:?}");
        assert!(times[2] >= 0.2 && times[2] < 0.2 + dt, "{times:?}");
        assert_eq!(times[3], 0.25);
    }

    #[test]
    fn low_ceiling_reports_blow_up() {
        let mut config = FlowConfig::new(-1.0, Mode::AreaPreserving, 64).unwrap();
        config.blowup_kappa = 1.05;
        config.t_end = 5.0;
        let out = run(&config, RadialCurve::canonical_example(64).unwrap()).unwrap();
        assert_eq!(out.reason, StopReason::CurvatureBlowUp);
        assert!(matches!(out.failure, Some(Error::CurvatureBlowUp { .. })));
    }

    #[test]
    fn recenter_fully_centres_offset_circle() {
        let spec = crate::oracle::CircleSpec::new(1.0, 0.4).unwrap();
        let curve = crate::oracle::circle_radial_function(&spec, 64).unwrap();
        let c = recenter_fully(&curve, 1e-12, 16);
        assert!(c.max_rho() - c.min_rho() < 1e-9, "{}", c.max_rho() - c.min_rho());
    }
}
