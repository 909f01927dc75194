//! Geometry of convex radial graphs `θ ↦ ρ(θ)` in the hyperbolic plane, written in
//! geodesic polar coordinates about a pole with metric `dr² + sinh²r dθ²`.
//!
//! Derivatives are spectral, integrals are trapezoidal on the periodic grid, so all
//! quantities converge exponentially in `n` for smooth curves.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{arcoth, cosh_m1};
use crate::spectral::{grid_angle, Spectral, TrigInterpolant};

/// Periodic samples of the radial function on the uniform grid `θ_j = 2πj/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialCurve {
    rho: Vec<f64>,
}

pub fn validate_grid_size(n: usize) -> Result<()> {
    if n >= 16 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidGridSize(n))
    }
}

impl RadialCurve {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        validate_grid_size(rho.len())?;
        if let Some((index, &value)) = rho
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveRadius { index, value });
        }
        Ok(Self { rho })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        validate_grid_size(n)?;
        Self::new((0..n).map(|j| f(grid_angle(j, n))).collect())
    }

    /// Geodesic circle of radius `r` centred at the pole.
    pub fn circle(n: usize, r: f64) -> Result<Self> {
        Self::from_fn(n, |_| r)
    }

    /// The canonical convex test curve `ρ(θ) = 2 + cos θ`.
    pub fn canonical_example(n: usize) -> Result<Self> {
        Self::from_fn(n, |t| 2.0 + t.cos())
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn into_rho(self) -> Vec<f64> {
        self.rho
    }

    pub fn theta(&self, j: usize) -> f64 {
        grid_angle(j, self.len())
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.theta(j)).collect()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    pub fn interpolant(&self) -> TrigInterpolant {
        TrigInterpolant::from_samples(&self.rho)
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Geodesic curvature of a radial graph (inner normal) from `ρ`, `ρ_θ`, `ρ_θθ`.
#[inline]
pub fn graph_curvature(rho: f64, rho_t: f64, rho_tt: f64) -> f64 {
    let (s, c) = (rho.sinh(), rho.cosh());
    let q = s * s + rho_t * rho_t;
    (s * s * c + 2.0 * rho_t * rho_t * c - rho_tt * s) / (q * q.sqrt())
}

/// Per-sample derived quantities shared by every geometric and flow computation.
#[derive(Debug, Clone)]
pub struct CurveFields {
    pub rho: Vec<f64>,
    pub rho_theta: Vec<f64>,
    pub rho_thetatheta: Vec<f64>,
    pub sinh: Vec<f64>,
    pub cosh: Vec<f64>,
    /// Arc-length density `sqrt(ρ_θ² + sinh²ρ)`, so `ds = speed · dθ`.
    pub speed: Vec<f64>,
    pub kappa: Vec<f64>,
    pub spacing: f64,
}

impl CurveFields {
    pub fn new(curve: &RadialCurve) -> Self {
        let (rho_theta, rho_thetatheta) = Spectral::shared(curve.len()).derivatives(curve.rho());
        Self::from_derivatives(curve.rho().to_vec(), rho_theta, rho_thetatheta)
    }

    pub fn from_derivatives(rho: Vec<f64>, rho_theta: Vec<f64>, rho_thetatheta: Vec<f64>) -> Self {
        let n = rho.len();
        let sinh: Vec<f64> = rho.iter().map(|r| r.sinh()).collect();
        let cosh: Vec<f64> = rho.iter().map(|r| r.cosh()).collect();
        let speed = (0..n).map(|j| rho_theta[j].hypot(sinh[j])).collect();
        let kappa = (0..n)
            .map(|j| graph_curvature(rho[j], rho_theta[j], rho_thetatheta[j]))
            .collect();
        Self {
            rho,
            rho_theta,
            rho_thetatheta,
            sinh,
            cosh,
            speed,
            kappa,
            spacing: 2.0 * PI / n as f64,
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// `∫ f ds` by the trapezoidal rule, summed in index order.
    pub fn integrate_ds(&self, f: impl Fn(usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.len() {
            acc += f(j) * self.speed[j];
        }
        acc * self.spacing
    }

    pub fn length(&self) -> f64 {
        self.integrate_ds(|_| 1.0)
    }

    pub fn area(&self) -> f64 {
        self.rho.iter().map(|&r| cosh_m1(r)).sum::<f64>() * self.spacing
    }

    pub fn min_kappa(&self) -> f64 {
        self.kappa.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_kappa(&self) -> f64 {
        self.kappa.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn require_convex(&self) -> Result<()> {
        let min_kappa = self.min_kappa();
        if min_kappa > 0.0 {
            Ok(())
        } else {
            Err(Error::ConvexityViolation { min_kappa })
        }
    }
}

pub fn derivatives(curve: &RadialCurve) -> (Vec<f64>, Vec<f64>) {
    Spectral::shared(curve.len()).derivatives(curve.rho())
}

pub fn curvature_profile(curve: &RadialCurve) -> Vec<f64> {
    CurveFields::new(curve).kappa
}

pub fn length(curve: &RadialCurve) -> f64 {
    CurveFields::new(curve).length()
}

/// Enclosed area `∫ (cosh ρ − 1) dθ`.
pub fn area(curve: &RadialCurve) -> f64 {
    curve.rho().iter().map(|&r| cosh_m1(r)).sum::<f64>() * curve.spacing()
}

/// `L² − 4πA − A²`.
pub fn deficit(length: f64, area: f64) -> f64 {
    length * length - area * (4.0 * PI + area)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum OuterRadiusBound {
    Bounded(f64),
    /// The deficit estimate does not bound the outer radius for this curve.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusBounds {
    pub rho_minus_lb: f64,
    pub rho_plus_ub: OuterRadiusBound,
}

/// Inner/outer radius estimates from length, area and the isoperimetric deficit.
pub fn radius_bounds(length: f64, area: f64) -> Result<RadiusBounds> {
    if !(length > 0.0 && area > 0.0) {
        return Err(Error::InvalidParameter {
            name: "length/area",
            reason: format!("must be positive, got L = {length}, A = {area}"),
        });
    }
    let d = deficit(length, area);
    if d < -1e-10 * length * length {
        return Err(Error::NegativeDeficit(d));
    }
    Ok(radius_bounds_clamped(length, area, d))
}

/// Deficits below the rounding floor of `L² − 4πA − A²` are indistinguishable from 0.
fn deficit_noise_floor(length: f64, area: f64) -> f64 {
    8.0 * f64::EPSILON * (length * length + area * (4.0 * PI + area))
}

fn radius_bounds_clamped(length: f64, area: f64, d: f64) -> RadiusBounds {
    let d = if d <= deficit_noise_floor(length, area) { 0.0 } else { d };
    let root = d.sqrt();
    let lower_arg = (length + root) / area;
    let upper_arg = (length - root) / area;
    RadiusBounds {
        rho_minus_lb: 2.0 * arcoth(lower_arg),
        rho_plus_ub: if upper_arg > 1.0 {
            OuterRadiusBound::Bounded(2.0 * arcoth(upper_arg))
        } else {
            OuterRadiusBound::Unbounded
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummary {
    pub length: f64,
    pub area: f64,
    pub deficit: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    /// `max(κ + 1/κ)`.
    pub w_max: f64,
    pub total_curvature: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_minus_lb: f64,
    pub rho_plus_ub: OuterRadiusBound,
}

/// Brent minimization of `f` on `[a, b]`.
fn brent_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let xm = 0.5 * (a + b);
        let tol2 = 2.0 * tol;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol { x + d } else { x + tol.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Maximum of the continuous function `f` whose grid samples are `samples`,
/// refined around the best sample.
fn refine_max(samples: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = samples.len();
    let (j, &best) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty samples");
    let h = 2.0 * PI / n as f64;
    let t0 = grid_angle(j, n);
    let (t, neg) = brent_min(|t| -f(t), t0 - h, t0 + h, 1e-10);
    if -neg > best {
        (t, -neg)
    } else {
        (t0, best)
    }
}

fn refine_min(samples: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let negated: Vec<f64> = samples.iter().map(|v| -v).collect();
    let (t, v) = refine_max(&negated, |t| -f(t));
    (t, -v)
}

/// Extremes of curvature and radius of the trigonometric interpolant of `ρ`.
#[derive(Debug, Clone, Copy)]
pub struct Extremes {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub rho_min: f64,
    pub rho_max: f64,
}

pub fn continuous_extremes(fields: &CurveFields, interp: &TrigInterpolant) -> Extremes {
    let kappa_at = |t: f64| {
        let (r, d1, d2) = interp.eval(t);
        graph_curvature(r, d1, d2)
    };
    let rho_at = |t: f64| interp.value(t);
    Extremes {
        kappa_min: refine_min(&fields.kappa, kappa_at).1,
        kappa_max: refine_max(&fields.kappa, kappa_at).1,
        rho_min: refine_min(&fields.rho, rho_at).1,
        rho_max: refine_max(&fields.rho, rho_at).1,
    }
}

/// `κ + 1/κ` is convex in `κ`, so its maximum sits at one of the curvature extremes.
pub fn w_of(kappa: f64) -> f64 {
    kappa + 1.0 / kappa
}

pub fn summarize(curve: &RadialCurve) -> GeometricSummary {
    let fields = CurveFields::new(curve);
    summarize_fields(&fields, &curve.interpolant())
}

pub fn summarize_fields(fields: &CurveFields, interp: &TrigInterpolant) -> GeometricSummary {
    let length = fields.length();
    let area = fields.area();
    let d = deficit(length, area);
    let ext = continuous_extremes(fields, interp);
    let bounds = radius_bounds_clamped(length, area, d);
    GeometricSummary {
        length,
        area,
        deficit: d,
        kappa_min: ext.kappa_min,
        kappa_max: ext.kappa_max,
        w_max: w_of(ext.kappa_min).max(w_of(ext.kappa_max)),
        total_curvature: fields.integrate_ds(|j| fields.kappa[j]),
        rho_min: ext.rho_min,
        rho_max: ext.rho_max,
        rho_minus_lb: bounds.rho_minus_lb,
        rho_plus_ub: bounds.rho_plus_ub,
    }
}

/// The three curve integrals entering the Chebyshev ordering for exponent `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct ChebyshevTerms {
    pub length: f64,
    pub total_curvature: f64,
    /// `∫ κ^α ds`
    pub power: f64,
    /// `∫ κ^{α+1} ds`
    pub power_plus_one: f64,
}

impl ChebyshevTerms {
    pub fn new(fields: &CurveFields, alpha: f64) -> Result<Self> {
        fields.require_convex()?;
        let mut power = 0.0;
        let mut power_plus_one = 0.0;
        for j in 0..fields.len() {
            let k = fields.kappa[j];
            let ka = k.powf(alpha);
            power += ka * fields.speed[j];
            power_plus_one += ka * k * fields.speed[j];
        }
        Ok(Self {
            length: fields.length(),
            total_curvature: fields.integrate_ds(|j| fields.kappa[j]),
            power: power * fields.spacing,
            power_plus_one: power_plus_one * fields.spacing,
        })
    }

    /// `∫κ ds · ∫κ^α ds − L · ∫κ^{α+1} ds`, non-negative for `α < 0`.
    pub fn gap(&self) -> f64 {
        self.total_curvature * self.power - self.length * self.power_plus_one
    }

    /// Magnitude of the terms being differenced.
    pub fn scale(&self) -> f64 {
        (self.total_curvature * self.power).abs() + (self.length * self.power_plus_one).abs()
    }
}

pub fn chebyshev_gap(curve: &RadialCurve, alpha: f64) -> Result<f64> {
    Ok(ChebyshevTerms::new(&CurveFields::new(curve), alpha)?.gap())
}

/// Image of the curve in the Poincaré disk: Euclidean radius `tanh(ρ/2)` at angle `θ`.
pub fn poincare_points(curve: &RadialCurve) -> Vec<[f64; 2]> {
    curve
        .rho()
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let radius = (0.5 * r).tanh();
            let (s, c) = curve.theta(j).sin_cos();
            [radius * c, radius * s]
        })
        .collect()
}

/// Spectral tail-energy diagnostic for the smoothness contract.
pub fn tail_energy(curve: &RadialCurve) -> f64 {
    crate::spectral::tail_energy(curve.rho())
}
