//! Predicted time derivatives used as consistency checks on the integrator.

use crate::error::Result;
use crate::flow::config::Mode;
use crate::flow::engine::evaluate;
use crate::geometry::RadialCurve;
use crate::spectral::Spectral;

/// `∂κ/∂t` at fixed `θ` for the radial-graph evolution:
/// `−∂²_s(κ^α) + (κ² − 1)(φ − κ^α) + T ∂_s κ` with tangential speed `T = ρ_t ρ_θ / |γ_θ|`.
pub fn curvature_time_derivative(curve: &RadialCurve, alpha: f64, mode: Mode) -> Result<Vec<f64>> {
    let eval = evaluate(curve, alpha, mode)?;
    let f = &eval.fields;
    let spectral = Spectral::shared(curve.len());
    let g = &f.speed;
    let pow_s: Vec<f64> = spectral
        .derivative(&eval.kappa_pow)
        .iter()
        .zip(g)
        .map(|(d, g)| d / g)
        .collect();
    let pow_ss = spectral.derivative(&pow_s);
    let kappa_theta = spectral.derivative(&f.kappa);
    Ok((0..f.len())
        .map(|j| {
            let k = f.kappa[j];
            let normal = -pow_ss[j] / g[j] + (k * k - 1.0) * (eval.phi - eval.kappa_pow[j]);
            let tangential = eval.rate[j] * f.rho_theta[j] / g[j];
            normal + tangential * kappa_theta[j] / g[j]
        })
        .collect())
}

/// `dL/dt = −∫ κ (φ − κ^α) ds`.
pub fn length_rate(curve: &RadialCurve, alpha: f64, mode: Mode) -> Result<f64> {
    let eval = evaluate(curve, alpha, mode)?;
    let f = &eval.fields;
    Ok(-f.integrate_ds(|j| f.kappa[j] * (eval.phi - eval.kappa_pow[j])))
}

/// `dA/dt = −∫ (φ − κ^α) ds`.
pub fn area_rate(curve: &RadialCurve, alpha: f64, mode: Mode) -> Result<f64> {
    let eval = evaluate(curve, alpha, mode)?;
    let f = &eval.fields;
    Ok(-f.integrate_ds(|j| eval.phi - eval.kappa_pow[j]))
}
