//! Right-hand side of the radial-graph evolution
//! `∂ρ/∂t = −(φ − κ^α) · sqrt(1 + ρ_θ²/sinh²ρ)` and its explicit RK4 integration.

use crate::error::{Error, Result};
use crate::flow::config::{FlowConfig, Mode};
use crate::geometry::{CurveFields, RadialCurve};

/// Smallest step the integrator will take before declaring underflow.
pub const MIN_DT: f64 = 1e-14;

/// Everything the right-hand side needs at one curve.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub fields: CurveFields,
    pub phi: f64,
    /// `κ^α` per sample.
    pub kappa_pow: Vec<f64>,
    /// `∂ρ/∂t` per sample.
    pub rate: Vec<f64>,
}

/// Global term from precomputed fields. Requires a convex curve.
pub fn global_term_fields(fields: &CurveFields, alpha: f64, mode: Mode) -> Result<f64> {
    fields.require_convex()?;
    Ok(global_term_unchecked(fields, mode, |j| fields.kappa[j].powf(alpha)))
}

fn global_term_unchecked(fields: &CurveFields, mode: Mode, kappa_pow: impl Fn(usize) -> f64) -> f64 {
    match mode {
        Mode::AreaPreserving => fields.integrate_ds(&kappa_pow) / fields.length(),
        Mode::LengthPreserving => {
            fields.integrate_ds(|j| kappa_pow(j) * fields.kappa[j])
                / fields.integrate_ds(|j| fields.kappa[j])
        }
    }
}

pub fn global_term(curve: &RadialCurve, alpha: f64, mode: Mode) -> Result<f64> {
    global_term_fields(&CurveFields::new(curve), alpha, mode)
}

pub fn evaluate(curve: &RadialCurve, alpha: f64, mode: Mode) -> Result<Evaluation> {
    let fields = CurveFields::new(curve);
    fields.require_convex()?;
    let kappa_pow: Vec<f64> = fields.kappa.iter().map(|k| k.powf(alpha)).collect();
    let phi = global_term_unchecked(&fields, mode, |j| kappa_pow[j]);
    let rate = (0..fields.len())
        .map(|j| -(phi - kappa_pow[j]) * fields.speed[j] / fields.sinh[j])
        .collect();
    Ok(Evaluation {
        fields,
        phi,
        kappa_pow,
        rate,
    })
}

pub fn rhs(curve: &RadialCurve, alpha: f64, mode: Mode) -> Result<Vec<f64>> {
    Ok(evaluate(curve, alpha, mode)?.rate)
}

/// `∂(rhs)/∂ρ_θθ = −α κ^{α−1} / (ρ_θ² + sinh²ρ)`, positive for convex curves and `α < 0`.
pub fn diffusion_from_fields(fields: &CurveFields, alpha: f64) -> Vec<f64> {
    (0..fields.len())
        .map(|j| {
            let g = fields.speed[j];
            -alpha * fields.kappa[j].powf(alpha - 1.0) / (g * g)
        })
        .collect()
}

pub fn diffusion_coefficient(curve: &RadialCurve, alpha: f64) -> Vec<f64> {
    diffusion_from_fields(&CurveFields::new(curve), alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub curve: RadialCurve,
    pub phi: f64,
    pub kappa: Vec<f64>,
    pub step_count: u64,
}

/// Stable step `cfl · h² / max D`, clamped so that `t + dt <= t_end`.
pub fn adaptive_dt(state: &FlowState, config: &FlowConfig) -> Result<f64> {
    let fields = CurveFields::new(&state.curve);
    let d_max = diffusion_from_fields(&fields, config.alpha)
        .into_iter()
        .fold(0.0, f64::max);
    let h = fields.spacing;
    let dt = config.cfl_safety * h * h / d_max;
    if !(dt >= MIN_DT) {
        return Err(Error::StepUnderflow(dt));
    }
    Ok(dt.min(config.t_end - state.t))
}

/// Owns a validated configuration and advances [`FlowState`]s.
#[derive(Debug, Clone)]
pub struct FlowEngine {
    config: FlowConfig,
    sign: f64,
}

impl FlowEngine {
    pub fn new(config: FlowConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, sign: 1.0 })
    }

    pub fn config(&self) -> &FlowConfig {
        &self.config
    }

    /// Mutation hook for detector tests: reverses the sign of the evolution.
    #[doc(hidden)]
    pub fn with_reversed_sign(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    pub fn evaluate(&self, curve: &RadialCurve) -> Result<Evaluation> {
        let mut eval = evaluate(curve, self.config.alpha, self.config.mode)?;
        if self.sign != 1.0 {
            eval.rate.iter_mut().for_each(|r| *r *= self.sign);
        }
        Ok(eval)
    }

    pub fn state_at(&self, curve: RadialCurve, t: f64, step_count: u64) -> Result<FlowState> {
        if curve.len() != self.config.n {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!(
                    "curve has {} samples, configuration expects {}",
                    curve.len(),
                    self.config.n
                ),
            });
        }
        let eval = self.evaluate(&curve)?;
        Ok(FlowState {
            t,
            curve,
            phi: eval.phi,
            kappa: eval.fields.kappa,
            step_count,
        })
    }

    pub fn adaptive_dt(&self, state: &FlowState) -> Result<f64> {
        adaptive_dt(state, &self.config)
    }

    /// One classical RK4 step with the global term refreshed at every stage.
    pub fn step(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive and finite, got {dt}"),
            });
        }
        let rho0 = state.curve.rho();
        let stage = |base: &[f64], k: &[f64], w: f64| -> Result<RadialCurve> {
            RadialCurve::new(base.iter().zip(k).map(|(r, d)| r + w * d).collect())
        };
        let k1 = self.evaluate(&state.curve)?.rate;
        let k2 = self.evaluate(&stage(rho0, &k1, 0.5 * dt)?)?.rate;
        let k3 = self.evaluate(&stage(rho0, &k2, 0.5 * dt)?)?.rate;
        let k4 = self.evaluate(&stage(rho0, &k3, dt)?)?.rate;
        let next: Vec<f64> = (0..rho0.len())
            .map(|j| rho0[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
            .collect();
        let curve = RadialCurve::new(next)?;

        let fields = CurveFields::new(&curve);
        let (min_kappa, max_kappa) = (fields.min_kappa(), fields.max_kappa());
        if !(min_kappa >= self.config.convexity_floor) {
            return Err(Error::ConvexityLost {
                min_kappa,
                floor: self.config.convexity_floor,
            });
        }
        if !(max_kappa <= self.config.blowup_kappa) {
            return Err(Error::CurvatureBlowUp {
                max_kappa,
                ceiling: self.config.blowup_kappa,
            });
        }
        let phi = global_term_fields(&fields, self.config.alpha, self.config.mode)?;
        Ok(FlowState {
            t: state.t + dt,
            curve,
            phi,
            kappa: fields.kappa,
            step_count: state.step_count + 1,
        })
    }

    /// Steps with the adaptive size until exactly `t_target`, without recentering.
    pub fn advance_to(&self, mut state: FlowState, t_target: f64) -> Result<FlowState> {
        let clamp = FlowConfig {
            t_end: t_target,
            ..self.config.clone()
        };
        while state.t < t_target {
            let dt = adaptive_dt(&state, &clamp)?;
            let reaches = state.t + dt >= t_target || t_target - (state.t + dt) < 1e-13;
            state = self.step(&state, dt)?;
            if reaches {
                state.t = t_target;
            }
        }
        Ok(state)
    }
}
