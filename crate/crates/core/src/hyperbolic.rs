//! Inverse hyperbolic functions written out through `ln_1p` so that arguments
//! close to the branch point (1 for `arcosh`/`arcoth`) keep full precision.

/// `arcosh(1 + u)` for `u >= 0`.
pub fn arcosh1p(u: f64) -> f64 {
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}

pub fn arcosh(x: f64) -> f64 {
    arcosh1p(x - 1.0)
}

pub fn arsinh(y: f64) -> f64 {
    let a = y.abs();
    let r = (a + a * a / (1.0 + (1.0 + a * a).sqrt())).ln_1p();
    r.copysign(y)
}

/// `arcoth(x)` for `x > 1`.
pub fn arcoth(x: f64) -> f64 {
    0.5 * (2.0 / (x - 1.0)).ln_1p()
}

/// `cosh(x) - 1` without cancellation for small `x`.
pub fn cosh_m1(x: f64) -> f64 {
    let s = (0.5 * x).sinh();
    2.0 * s * s
}
