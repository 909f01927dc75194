//! Area- and length-preserving `κ^α` curvature flows (`α < 0`) of convex curves in the
//! hyperbolic plane, written as radial graphs about a pole.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod hyperbolic;
pub mod oracle;
pub mod spectral;

pub use diagnostics::fit::{fit_decay_rate, fit_exponential, DecayFit};
pub use diagnostics::linear::{limit_radius, linear_model, LinearizedModel};
pub use diagnostics::monitor::{sufficient_condition_monitor, MonitorSample, SufficientCondition};
pub use diagnostics::monotonicity::{monotonicity_report, MonotonicityReport, QuantityVerdict};
pub use diagnostics::series::{series_header, DiagnosticsSeries, SeriesRow};
pub use diagnostics::fourier_modes;
pub use error::{Error, Result};
pub use flow::config::{FlowConfig, Mode};
pub use flow::engine::{adaptive_dt, diffusion_coefficient, global_term, rhs, FlowEngine, FlowState};
pub use flow::recenter::{recenter, Recentered};
pub use flow::run::{
    resume, run, ConservedReference, RecenterEvent, RunOutcome, Snapshot, StopReason,
    WMonitorStats,
};
pub use geometry::{
    area, chebyshev_gap, curvature_profile, deficit, derivatives, length, poincare_points,
    radius_bounds, summarize, GeometricSummary, OuterRadiusBound, RadialCurve, RadiusBounds,
};
pub use oracle::{circle_radial_function, CircleSpec};
