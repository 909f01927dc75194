//! Step-by-step verdicts on the monotone and conserved quantities of a run.

use serde::{Deserialize, Serialize};

use crate::diagnostics::series::{DiagnosticsSeries, SeriesRow};
use crate::flow::config::Mode;

/// Per-step slack, relative to the quantity's initial scale.
pub const STEP_TOLERANCE: f64 = 1e-10;
/// Allowed relative drift of a conserved quantity over the whole run.
pub const CONSERVATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    NonIncreasing,
    NonDecreasing,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityVerdict {
    pub quantity: String,
    pub trend: Trend,
    pub passed: bool,
    /// Largest step increase (non-increasing), decrease (non-decreasing) or relative
    /// drift from the first row (constant). Zero when never violated.
    pub max_violation: f64,
    pub tolerance: f64,
    /// Row index of the worst violation.
    pub worst_row: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub verdicts: Vec<QuantityVerdict>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, quantity: &str) -> Option<&QuantityVerdict> {
        self.verdicts.iter().find(|v| v.quantity == quantity)
    }
}

fn step_verdict(
    rows: &[SeriesRow],
    quantity: &str,
    trend: Trend,
    scale: f64,
    get: impl Fn(&SeriesRow) -> f64,
) -> QuantityVerdict {
    let mut worst = (0.0f64, None);
    match trend {
        Trend::Constant => {
            let q0 = get(&rows[0]);
            let denom = q0.abs().max(f64::MIN_POSITIVE);
            for (i, r) in rows.iter().enumerate() {
                let drift = (get(r) - q0).abs() / denom;
                if drift > worst.0 {
                    worst = (drift, Some(i));
                }
            }
            QuantityVerdict {
                quantity: quantity.into(),
                trend,
                passed: worst.0 <= CONSERVATION_TOLERANCE,
                max_violation: worst.0,
                tolerance: CONSERVATION_TOLERANCE,
                worst_row: worst.1,
            }
        }
        Trend::NonIncreasing | Trend::NonDecreasing => {
            let sign = if trend == Trend::NonIncreasing { 1.0 } else { -1.0 };
            for i in 1..rows.len() {
                let excess = sign * (get(&rows[i]) - get(&rows[i - 1]));
                if excess > worst.0 {
                    worst = (excess, Some(i));
                }
            }
            let tolerance = STEP_TOLERANCE * scale;
            QuantityVerdict {
                quantity: quantity.into(),
                trend,
                passed: worst.0 <= tolerance,
                max_violation: worst.0,
                tolerance,
                worst_row: worst.1,
            }
        }
    }
}

/// Deficit non-increasing; in area mode `A` constant and `L` non-increasing, in length
/// mode `L` constant and `A` non-decreasing.
pub fn monotonicity_report(series: &DiagnosticsSeries, mode: Mode) -> MonotonicityReport {
    let rows = series.rows();
    if rows.is_empty() {
        return MonotonicityReport {
            verdicts: Vec::new(),
        };
    }
    let first = &rows[0];
    let deficit = step_verdict(rows, "Delta", Trend::NonIncreasing, first.deficit.max(1.0), |r| {
        r.deficit
    });
    let verdicts = match mode {
        Mode::AreaPreserving => vec![
            deficit,
            step_verdict(rows, "L", Trend::NonIncreasing, first.length, |r| r.length),
            step_verdict(rows, "A", Trend::Constant, first.area, |r| r.area),
        ],
        Mode::LengthPreserving => vec![
            deficit,
            step_verdict(rows, "L", Trend::Constant, first.length, |r| r.length),
            step_verdict(rows, "A", Trend::NonDecreasing, first.area, |r| r.area),
        ],
    };
    MonotonicityReport { verdicts }
}
