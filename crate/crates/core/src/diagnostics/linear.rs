//! Linearization of the flow about its limit circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::config::Mode;
use crate::hyperbolic::{arcosh1p, arsinh};

/// Radius of the circle with the conserved area (area mode) or length (length mode).
pub fn limit_radius(mode: Mode, conserved: f64) -> Result<f64> {
    if !(conserved.is_finite() && conserved > 0.0) {
        return Err(Error::InvalidParameter {
            name: "conserved",
            reason: format!("must be positive, got {conserved}"),
        });
    }
    let scaled = conserved / (2.0 * std::f64::consts::PI);
    Ok(match mode {
        Mode::AreaPreserving => arcosh1p(scaled),
        Mode::LengthPreserving => arsinh(scaled),
    })
}

/// `η_t = c (η_θθ + η − mean η)` about the circle of radius `rho_inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedModel {
    pub alpha: f64,
    pub rho_inf: f64,
    /// `α tanh^{−α−1}(ρ∞) / cosh²(ρ∞)`, negative for `α < 0`.
    pub c: f64,
}

impl LinearizedModel {
    /// Decay rate of mode `k`: `−c (k² − 1)`; zero for the neutral modes 0 and 1.
    pub fn lambda(&self, k: usize) -> f64 {
        if k <= 1 {
            return 0.0;
        }
        let k = k as f64;
        -self.c * (k * k - 1.0)
    }
}

pub fn linear_model(alpha: f64, rho_inf: f64) -> Result<LinearizedModel> {
    if !(alpha.is_finite() && alpha < 0.0) {
        return Err(Error::NonNegativeAlpha(alpha));
    }
    if !(rho_inf.is_finite() && rho_inf > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho_inf",
            reason: format!("must be positive, got {rho_inf}"),
        });
    }
    let ch = rho_inf.cosh();
    let c = alpha * rho_inf.tanh().powf(-alpha - 1.0) / (ch * ch);
    Ok(LinearizedModel { alpha, rho_inf, c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn limit_radius_inverts_circle_formulas() {
        let a = 2.0 * PI * (1f64.cosh() - 1.0);
        assert!((limit_radius(Mode::AreaPreserving, a).unwrap() - 1.0).abs() < 1e-14);
        let l = 2.0 * PI * 1f64.sinh();
        assert!((limit_radius(Mode::LengthPreserving, l).unwrap() - 1.0).abs() < 1e-14);
        assert!(limit_radius(Mode::AreaPreserving, 0.0).is_err());
    }

    #[test]
    fn spectrum_for_alpha_minus_one() {
        let m = linear_model(-1.0, 1.0).unwrap();
        let ch2 = 1f64.cosh().powi(2);
        assert!((m.c + 1.0 / ch2).abs() < 1e-15);
        assert!((m.lambda(2) - 3.0 / ch2).abs() < 1e-15);
        assert!((m.lambda(2) - 1.2600).abs() < 1e-4);
        assert_eq!(m.lambda(0), 0.0);
        assert_eq!(m.lambda(1), 0.0);
    }

    #[test]
    fn spectrum_gaps_and_sign() {
        for &alpha in &[-0.5, -1.0, -2.0, -3.7] {
            let m = linear_model(alpha, 0.8).unwrap();
            assert!(m.c < 0.0);
            for k in 1..20usize {
                let gap = m.lambda(k + 1) - m.lambda(k);
                assert!((gap + m.c * (2 * k + 1) as f64).abs() <= 1e-12 * gap.abs());
                assert!(gap > 0.0);
            }
        }
        assert!(linear_model(0.5, 1.0).is_err());
        assert!(linear_model(-1.0, 0.0).is_err());
    }
}
