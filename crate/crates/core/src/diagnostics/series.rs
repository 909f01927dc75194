//! Per-step diagnostic rows.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diagnostics::monitor::{monitor_fields, MonitorSample};
use crate::error::{Error, Result};
use crate::flow::config::FlowConfig;
use crate::flow::engine::FlowState;
use crate::geometry::{summarize_fields, ChebyshevTerms, CurveFields};

/// Fixed leading columns of a series row; mode amplitudes `mode_0..mode_k` follow.
pub const FIXED_COLUMNS: [&str; 14] = [
    "t",
    "L",
    "A",
    "Delta",
    "kappa_min",
    "kappa_max",
    "W_max",
    "phi",
    "rho_min",
    "rho_max",
    "cheb_gap",
    "gb_residual",
    "v_min",
    "eta_measure",
];

pub fn series_header(k_max: usize) -> Vec<String> {
    FIXED_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain((0..=k_max).map(|k| format!("mode_{k}")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub length: f64,
    pub area: f64,
    pub deficit: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub w_max: f64,
    pub phi: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub cheb_gap: f64,
    /// `∫κ ds − (2π + A)`.
    pub gb_residual: f64,
    pub v_min: f64,
    pub eta_measure: f64,
    pub modes: Vec<f64>,
}

impl SeriesRow {
    /// Values in header order.
    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.t,
            self.length,
            self.area,
            self.deficit,
            self.kappa_min,
            self.kappa_max,
            self.w_max,
            self.phi,
            self.rho_min,
            self.rho_max,
            self.cheb_gap,
            self.gb_residual,
            self.v_min,
            self.eta_measure,
        ];
        v.extend_from_slice(&self.modes);
        v
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.len() <= FIXED_COLUMNS.len() {
            return Err(Error::InvalidParameter {
                name: "row",
                reason: format!(
                    "expected more than {} values, got {}",
                    FIXED_COLUMNS.len(),
                    values.len()
                ),
            });
        }
        Ok(Self {
            t: values[0],
            length: values[1],
            area: values[2],
            deficit: values[3],
            kappa_min: values[4],
            kappa_max: values[5],
            w_max: values[6],
            phi: values[7],
            rho_min: values[8],
            rho_max: values[9],
            cheb_gap: values[10],
            gb_residual: values[11],
            v_min: values[12],
            eta_measure: values[13],
            modes: values[FIXED_COLUMNS.len()..].to_vec(),
        })
    }
}

/// Rows in strictly increasing time.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    k_max: usize,
    rows: Vec<SeriesRow>,
}

impl DiagnosticsSeries {
    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            rows: Vec::new(),
        }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn rows(&self) -> &[SeriesRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn first(&self) -> Option<&SeriesRow> {
        self.rows.first()
    }

    pub fn last(&self) -> Option<&SeriesRow> {
        self.rows.last()
    }

    pub fn push(&mut self, row: SeriesRow) -> Result<()> {
        if row.modes.len() != self.k_max + 1 {
            return Err(Error::InvalidParameter {
                name: "row",
                reason: format!(
                    "expected {} mode amplitudes, got {}",
                    self.k_max + 1,
                    row.modes.len()
                ),
            });
        }
        if let Some(last) = self.rows.last() {
            if !(row.t > last.t) {
                return Err(Error::InvalidParameter {
                    name: "t",
                    reason: format!("rows must have increasing time: {} after {}", row.t, last.t),
                });
            }
        }
        self.rows.push(row);
        Ok(())
    }

    /// Appends `other`, dropping a leading row that repeats this series' last time.
    pub fn append(&mut self, other: &DiagnosticsSeries) -> Result<()> {
        let mut rows = other.rows.iter().peekable();
        if let (Some(last), Some(first)) = (self.rows.last(), rows.peek()) {
            if first.t == last.t {
                rows.next();
            }
        }
        for row in rows {
            self.push(row.clone())?;
        }
        Ok(())
    }
}

/// Diagnostic row and monitor sample for a live state.
pub fn observe(state: &FlowState, config: &FlowConfig, d: f64) -> Result<(SeriesRow, MonitorSample)> {
    let fields = CurveFields::new(&state.curve);
    let interp = state.curve.interpolant();
    let summary = summarize_fields(&fields, &interp);
    let cheb = ChebyshevTerms::new(&fields, config.alpha)?;
    let monitor = monitor_fields(&fields, state.phi, config.alpha, d, state.t);
    let modes = (0..=config.k_max).map(|k| interp.amplitude(k)).collect();
    let row = SeriesRow {
        t: state.t,
        length: summary.length,
        area: summary.area,
        deficit: summary.deficit,
        kappa_min: summary.kappa_min,
        kappa_max: summary.kappa_max,
        w_max: summary.w_max,
        phi: state.phi,
        rho_min: summary.rho_min,
        rho_max: summary.rho_max,
        cheb_gap: cheb.gap(),
        gb_residual: summary.total_curvature - (2.0 * PI + summary.area),
        v_min: monitor.v_min,
        eta_measure: monitor.eta_measure,
        modes,
    };
    Ok((row, monitor))
}
