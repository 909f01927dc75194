#![allow(dead_code)]

use hypflow_core::oracle::random_convex_curves;
use hypflow_core::RadialCurve;

pub fn random_convex_curve(seed: u64, n: usize, max_mode: usize) -> RadialCurve {
    random_convex_curves(seed, 1, n, max_mode).unwrap().remove(0)
}

pub fn perturbed_circle(n: usize, rho_inf: f64, eps: f64, k: usize) -> RadialCurve {
    RadialCurve::from_fn(n, |t| rho_inf * (1.0 + eps * (k as f64 * t).cos())).unwrap()
}
