//! Recording and analysis of flow trajectories.

pub mod evolution;
pub mod fit;
pub mod linear;
pub mod monitor;
pub mod monotonicity;
pub mod series;

use crate::geometry::RadialCurve;

/// Full amplitudes `sqrt(a_k² + b_k²)` of the real harmonics of `ρ` for `k = 0..=k_max`,
/// with the mean in slot 0.
pub fn fourier_modes(curve: &RadialCurve, k_max: usize) -> Vec<f64> {
    let interp = curve.interpolant();
    (0..=k_max).map(|k| interp.amplitude(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_inputs() {
        let modes = fourier_modes(&RadialCurve::circle(32, 1.0).unwrap(), 4);
        assert!((modes[0] - 1.0).abs() < 1e-15);
        assert!(modes[1..].iter().all(|&m| m < 1e-15));

        let modes = fourier_modes(&RadialCurve::canonical_example(32).unwrap(), 3);
        assert!((modes[0] - 2.0).abs() < 1e-15);
        assert!((modes[1] - 1.0).abs() < 1e-15);
        assert!(modes[2] < 1e-15 && modes[3] < 1e-15);

        let (r, eps) = (2.2, 1e-3);
        let curve = RadialCurve::from_fn(64, |t| r * (1.0 + eps * (2.0 * t).cos())).unwrap();
        assert!((fourier_modes(&curve, 2)[2] - eps * r).abs() < 1e-16);
    }
}
