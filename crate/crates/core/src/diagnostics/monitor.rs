//! Monitor for the sufficient condition on `V = 1/κ`.

use serde::{Deserialize, Serialize};

use crate::flow::config::FlowConfig;
use crate::flow::engine::FlowState;
use crate::geometry::CurveFields;

/// Constants of the sufficient condition, fixed by the initial curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientCondition {
    /// `min(min κ(·, 0), 1)`.
    pub kappa_lower_bar: f64,
    /// The limit radius of the conserved quantity.
    pub d: f64,
    /// `κ̲₀² D / 8`.
    pub b: f64,
}

impl SufficientCondition {
    pub fn new(initial_kappa_min: f64, d: f64) -> Self {
        let kappa_lower_bar = initial_kappa_min.min(1.0);
        Self {
            kappa_lower_bar,
            d,
            b: kappa_lower_bar * kappa_lower_bar * d / 8.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorSample {
    pub t: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Arc length of `{φ ≥ V^{−α}} ∩ {V² < 3/2}`.
    pub eta_measure: f64,
    /// `min V <= D <= max V`.
    pub crossing: bool,
    /// `min V >= D/4`.
    pub v_min_above_quarter_d: bool,
}

pub fn monitor_fields(fields: &CurveFields, phi: f64, alpha: f64, d: f64, t: f64) -> MonitorSample {
    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &k in &fields.kappa {
        let v = 1.0 / k;
        v_min = v_min.min(v);
        v_max = v_max.max(v);
    }
    let eta_measure = fields.integrate_ds(|j| {
        let v = 1.0 / fields.kappa[j];
        if phi >= v.powf(-alpha) && v * v < 1.5 {
            1.0
        } else {
            0.0
        }
    });
    MonitorSample {
        t,
        v_min,
        v_max,
        eta_measure,
        crossing: v_min <= d && d <= v_max,
        v_min_above_quarter_d: v_min >= 0.25 * d,
    }
}

pub fn sufficient_condition_monitor(state: &FlowState, config: &FlowConfig, d: f64) -> MonitorSample {
    let fields = CurveFields::new(&state.curve);
    monitor_fields(&fields, state.phi, config.alpha, d, state.t)
}
