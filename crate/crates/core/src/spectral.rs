//! Fourier machinery for periodic samples on the uniform grid `θ_j = 2πj/n`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Cached forward/inverse transforms for one grid size.
pub struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

fn wavenumber(j: usize, n: usize) -> f64 {
    if j <= n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Process-wide plan for size `n`.
    pub fn shared(n: usize) -> Arc<Spectral> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Spectral>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(Spectral::new(n)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized DFT `X_k = Σ_j f_j e^{-ikθ_j}`.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.n, "sample count does not match plan");
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spectrum);
        let scale = 1.0 / self.n as f64;
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }

    /// First and second derivatives from a spectrum produced by [`Spectral::forward`].
    ///
    /// The Nyquist mode is dropped from the first derivative (its derivative vanishes on
    /// the grid) and kept with weight `-(n/2)^2` in the second.
    pub fn derivatives_from_spectrum(&self, spectrum: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for (j, &c) in spectrum.iter().enumerate() {
            let k = wavenumber(j, n);
            if j == n / 2 {
                d1.push(Complex64::new(0.0, 0.0));
            } else {
                d1.push(c * Complex64::new(0.0, k));
            }
            d2.push(c * (-k * k));
        }
        (self.inverse_real(d1), self.inverse_real(d2))
    }

    pub fn derivatives(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let spectrum = self.forward(values);
        self.derivatives_from_spectrum(&spectrum)
    }

    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        let n = self.n;
        let spectrum: Vec<Complex64> = self
            .forward(values)
            .into_iter()
            .enumerate()
            .map(|(j, c)| {
                if j == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, wavenumber(j, n))
                }
            })
            .collect();
        self.inverse_real(spectrum)
    }
}

/// Real trigonometric interpolant
/// `f(θ) = a_0 + Σ_{k=1}^{n/2-1} (a_k cos kθ + b_k sin kθ) + a_{n/2} cos(nθ/2)`.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    nyquist: f64,
}

impl TrigInterpolant {
    pub fn from_spectrum(spectrum: &[Complex64]) -> Self {
        let n = spectrum.len();
        let scale = 1.0 / n as f64;
        let half = n / 2;
        let mut cos = vec![0.0; half];
        let mut sin = vec![0.0; half];
        for k in 1..half {
            cos[k] = 2.0 * spectrum[k].re * scale;
            sin[k] = -2.0 * spectrum[k].im * scale;
        }
        Self {
            mean: spectrum[0].re * scale,
            cos,
            sin,
            nyquist: spectrum[half].re * scale,
        }
    }

    pub fn from_samples(values: &[f64]) -> Self {
        Self::from_spectrum(&Spectral::shared(values.len()).forward(values))
    }

    pub fn len(&self) -> usize {
        2 * self.cos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cos.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `(a_k, b_k)` for `1 <= k < n/2`; `(a_{n/2}, 0)` at the Nyquist index.
    pub fn harmonic(&self, k: usize) -> (f64, f64) {
        let half = self.cos.len();
        match k {
            0 => (self.mean, 0.0),
            k if k < half => (self.cos[k], self.sin[k]),
            k if k == half => (self.nyquist, 0.0),
            _ => (0.0, 0.0),
        }
    }

    /// Full amplitude of the real harmonic, `sqrt(a_k^2 + b_k^2)`; the mean for `k = 0`.
    pub fn amplitude(&self, k: usize) -> f64 {
        if k == 0 {
            return self.mean;
        }
        let (a, b) = self.harmonic(k);
        a.hypot(b)
    }

    /// Value with first and second derivatives at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        let half = self.cos.len();
        let step = Complex64::from_polar(1.0, theta);
        let mut rot = Complex64::new(1.0, 0.0);
        let (mut f, mut d1, mut d2) = (self.mean, 0.0, 0.0);
        for k in 1..half {
            rot *= step;
            let kf = k as f64;
            let (a, b) = (self.cos[k], self.sin[k]);
            let (c, s) = (rot.re, rot.im);
            let val = a * c + b * s;
            f += val;
            d1 += kf * (b * c - a * s);
            d2 -= kf * kf * val;
        }
        let kn = half as f64;
        let (s, c) = (kn * theta).sin_cos();
        f += self.nyquist * c;
        d1 -= kn * self.nyquist * s;
        d2 -= kn * kn * self.nyquist * c;
        (f, d1, d2)
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.eval(theta).0
    }
}

/// Fraction of spectral energy held by the top third of the resolved wavenumbers.
pub fn tail_energy(values: &[f64]) -> f64 {
    let n = values.len();
    let spectrum = Spectral::shared(n).forward(values);
    let cutoff = (n / 2) as f64 * 2.0 / 3.0;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (j, c) in spectrum.iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if wavenumber(j, n).abs() >= cutoff {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

pub fn grid_angle(j: usize, n: usize) -> f64 {
    2.0 * PI * j as f64 / n as f64
}
