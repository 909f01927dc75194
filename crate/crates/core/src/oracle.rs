//! Independent references: exact circle solutions, off-centre circles, the closed-form
//! linearized evolution and a finite-difference curvature.
//!
//! Nothing here goes through the spectral derivative path used by the flow, so these
//! functions can cross-check it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::linear::LinearizedModel;
use crate::error::{Error, Result};
use crate::flow::config::Mode;
use crate::flow::engine::rhs;
use crate::geometry::{graph_curvature, CurveFields, RadialCurve};
use crate::spectral::grid_angle;

/// Geodesic circle of `radius` whose centre lies `center_offset` from the pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSpec {
    radius: f64,
    center_offset: f64,
}

impl CircleSpec {
    pub fn new(radius: f64, center_offset: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter {
                name: "radius",
                reason: format!("must be positive, got {radius}"),
            });
        }
        if !(center_offset >= 0.0 && center_offset < radius) {
            return Err(Error::InvalidParameter {
                name: "center_offset",
                reason: format!("must lie in [0, radius), got {center_offset}"),
            });
        }
        Ok(Self {
            radius,
            center_offset,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center_offset(&self) -> f64 {
        self.center_offset
    }
}

/// Distance from the pole to the circle along direction `theta`, from
/// `cosh r = cosh d cosh ρ − sinh d sinh ρ cos θ` (centre in direction 0).
fn circle_distance(spec: &CircleSpec, theta: f64) -> Result<f64> {
    let (r, d) = (spec.radius, spec.center_offset);
    if d == 0.0 {
        return Ok(r);
    }
    let (ch_d, sh_d) = (d.cosh(), d.sinh());
    let cos_t = theta.cos();
    let target = r.cosh();
    let f = |rho: f64| ch_d * rho.cosh() - sh_d * rho.sinh() * cos_t - target;
    let df = |rho: f64| ch_d * rho.sinh() - sh_d * rho.cosh() * cos_t;

    // f(r − d) <= 0 <= f(r + d) for every θ.
    let (mut lo, mut hi) = (r - d, r + d);
    if f(lo) >= 0.0 {
        return Ok(lo);
    }
    if f(hi) <= 0.0 {
        return Ok(hi);
    }
    let mut x = r + d * cos_t;
    for _ in 0..200 {
        let fx = f(x);
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = df(x);
        let mut next = x - fx / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-14 * x.max(1.0) || hi - lo <= 1e-15 * x.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootNotFound(theta))
}

pub fn circle_radial_function(spec: &CircleSpec, n: usize) -> Result<RadialCurve> {
    crate::geometry::validate_grid_size(n)?;
    let rho = (0..n)
        .map(|j| circle_distance(spec, grid_angle(j, n)))
        .collect::<Result<Vec<_>>>()?;
    RadialCurve::new(rho)
}

/// `max_j |∂ρ/∂t|` on the centred circle; zero up to rounding.
pub fn stationary_residual(radius: f64, alpha: f64, mode: Mode, n: usize) -> Result<f64> {
    let rate = rhs(&RadialCurve::circle(n, radius)?, alpha, mode)?;
    Ok(rate.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// Exact solution of the linearized equation per real Fourier mode.
pub fn linearized_evolution(
    initial_modes: &BTreeMap<usize, f64>,
    model: &LinearizedModel,
    t: f64,
) -> BTreeMap<usize, f64> {
    initial_modes
        .iter()
        .map(|(&k, &a)| (k, a * (-model.lambda(k) * t).exp()))
        .collect()
}

/// Convex curves `ρ = r₀ + Σ_{k≤K} (a_k cos kθ + b_k sin kθ)` with `|a_k|, |b_k| < r₀/(4k²)`,
/// drawn from a seeded generator; draws with `min κ <= 0.05` are discarded.
pub fn random_convex_curves(seed: u64, count: usize, n: usize, max_mode: usize) -> Result<Vec<RadialCurve>> {
    crate::geometry::validate_grid_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r0: f64 = rng.gen_range(0.3..2.5);
        let coeffs: Vec<(f64, f64)> = (1..=max_mode)
            .map(|k| {
                let scale = 0.25 * r0 / (k * k) as f64;
                (rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
            })
            .collect();
        let curve = RadialCurve::from_fn(n, |t| {
            r0 + coeffs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let k = (i + 1) as f64;
                    a * (k * t).cos() + b * (k * t).sin()
                })
                .sum::<f64>()
        });
        if let Ok(curve) = curve {
            if CurveFields::new(&curve).min_kappa() > 0.05 {
                out.push(curve);
            }
        }
    }
    Ok(out)
}

/// Curvature from second-order centred differences.
pub fn fd_curvature(curve: &RadialCurve) -> Vec<f64> {
    let n = curve.len();
    let h = curve.spacing();
    let rho = curve.rho();
    (0..n)
        .map(|j| {
            let prev = rho[(j + n - 1) % n];
            let next = rho[(j + 1) % n];
            let d1 = (next - prev) / (2.0 * h);
            let d2 = (next - 2.0 * rho[j] + prev) / (h * h);
            graph_curvature(rho[j], d1, d2)
        })
        .collect()
}
