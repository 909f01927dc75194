//! Re-expressing a curve as a radial graph about a different pole.
//!
//! Points are moved through the hyperboloid model: a point at polar coordinates
//! `(ρ, θ)` is `(cosh ρ, sinh ρ cos θ, sinh ρ sin θ)`, and the new pole is carried to
//! the origin by a rotation-conjugated Lorentz boost. New samples are found by solving
//! for the old angle whose image has the requested new angle.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{CurveFields, RadialCurve};
use crate::spectral::TrigInterpolant;

/// Retries after the first attempt, each halving the pole shift.
pub const MAX_RETRIES: usize = 8;

/// Table refinement used for the star-shape check and root bracketing.
const TABLE_FACTOR: usize = 4;

#[derive(Debug, Clone)]
pub struct Recentered {
    pub curve: RadialCurve,
    /// Geodesic distance the pole moved.
    pub shift: f64,
    /// Direction of the move, measured in the old frame.
    pub direction: f64,
    /// Number of halvings needed before the curve was star-shaped about the new pole.
    pub retries: usize,
}

/// Amplitude and phase of the first harmonic of `ρ`.
pub fn first_harmonic_drift(curve: &RadialCurve) -> (f64, f64) {
    let (a, b) = curve.interpolant().harmonic(1);
    (a.hypot(b), b.atan2(a))
}

/// `max|ρ_θ| / min sinh ρ`: how far the parametrization is from a centred one.
pub fn trigger_ratio(fields: &CurveFields) -> f64 {
    let slope = fields.rho_theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = fields.sinh.iter().copied().fold(f64::INFINITY, f64::min);
    slope / floor
}

/// Polar coordinates of an old-frame point seen from a pole at distance `shift`
/// in direction `direction`.
fn transform(rho: f64, theta: f64, shift: f64, direction: f64) -> (f64, f64) {
    let (s, c) = (rho.sinh(), rho.cosh());
    let (sin_t, cos_t) = (theta - direction).sin_cos();
    let (x, y, t) = (s * cos_t, s * sin_t, c);
    let (sh, ch) = (shift.sinh(), shift.cosh());
    let x2 = -t * sh + x * ch;
    let y2 = y;
    let radius = x2.hypot(y2).asinh();
    (radius, y2.atan2(x2) + direction)
}

fn wrap_to_pi(a: f64) -> f64 {
    let mut v = (a + PI).rem_euclid(TAU) - PI;
    if v <= -PI {
        v += TAU;
    }
    v
}

/// One resampling attempt about a pole at `(shift, direction)`.
pub fn resample_about(curve: &RadialCurve, shift: f64, direction: f64) -> Result<RadialCurve> {
    let interp = curve.interpolant();
    resample_with(&interp, curve.len(), shift, direction)
}

fn resample_with(
    interp: &TrigInterpolant,
    n: usize,
    shift: f64,
    direction: f64,
) -> Result<RadialCurve> {
    let m = TABLE_FACTOR * n;
    let old_angle = |i: usize| TAU * i as f64 / m as f64;
    let image = |theta: f64| transform(interp.value(theta), theta, shift, direction);

    // Unwrapped image angles; star-shaped about the new pole iff strictly increasing
    // with total winding 2π.
    let mut table = Vec::with_capacity(m + 1);
    let (_, first) = image(0.0);
    table.push(first);
    for i in 1..=m {
        let (_, raw) = image(old_angle(i));
        let prev = table[i - 1];
        let next = prev + wrap_to_pi(raw - prev);
        if next <= prev {
            return Err(Error::RecenterFailed(format!(
                "curve is not star-shaped about the pole shifted by {shift:.3e}"
            )));
        }
        table.push(next);
    }
    if (table[m] - table[0] - TAU).abs() > 1e-6 {
        return Err(Error::RecenterFailed(format!(
            "pole shifted by {shift:.3e} lies outside the curve"
        )));
    }
    // Close the table exactly so every target in [table[0], table[0] + 2π) is bracketed.
    table[m] = table[0] + TAU;

    let mut rho = Vec::with_capacity(n);
    let mut bracket = 0usize;
    for j in 0..n {
        let mut target = TAU * j as f64 / n as f64;
        while target < table[0] {
            target += TAU;
        }
        while target >= table[0] + TAU {
            target -= TAU;
        }
        // Rounding in the two loops above can leave the target just below the table.
        target = target.max(table[0]);
        while bracket < m - 1 && table[bracket + 1] <= target {
            bracket += 1;
        }
        // Targets are visited in increasing order after the shift into the table's
        // range, except for the wrap-around which restarts the scan.
        if table[bracket] > target {
            bracket = 0;
            while bracket < m - 1 && table[bracket + 1] <= target {
                bracket += 1;
            }
        }
        let base = table[bracket];
        let residual = |theta: f64| {
            let (_, raw) = image(theta);
            base + wrap_to_pi(raw - base) - target
        };
        let theta = solve_bracketed(
            residual,
            old_angle(bracket),
            old_angle(bracket + 1),
            table[bracket] - target,
            table[bracket + 1] - target,
        )?;
        rho.push(image(theta).0);
    }
    RadialCurve::new(rho)
}

/// Illinois false position on a sign-changing bracket.
fn solve_bracketed(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootNotFound(a));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() < 1e-15 || fc.abs() < 1e-15 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}

/// Moves the pole along the first-harmonic direction by the first-harmonic amplitude,
/// halving the move up to [`MAX_RETRIES`] times if the curve is not star-shaped about
/// the candidate pole.
pub fn recenter(curve: &RadialCurve) -> Result<Recentered> {
    let interp = curve.interpolant();
    let (a, b) = interp.harmonic(1);
    let amplitude = a.hypot(b);
    let direction = b.atan2(a);
    if amplitude < 1e-14 {
        return Ok(Recentered {
            curve: curve.clone(),
            shift: 0.0,
            direction,
            retries: 0,
        });
    }
    let mut shift = amplitude;
    let mut last_err = None;
    for retries in 0..=MAX_RETRIES {
        match resample_with(&interp, curve.len(), shift, direction) {
            Ok(new_curve) => {
                return Ok(Recentered {
                    curve: new_curve,
                    shift,
                    direction,
                    retries,
                })
            }
            Err(e) => last_err = Some(e),
        }
        shift *= 0.5;
    }
    Err(last_err.unwrap_or_else(|| Error::RecenterFailed("no attempt made".into())))
}
