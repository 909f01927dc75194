use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid size {0}: must be a power of two >= 16")]
    InvalidGridSize(usize),

    #[error("radial sample {index} must be positive and finite, got {value}")]
    NonPositiveRadius { index: usize, value: f64 },

    #[error("alpha must be negative, got {0}")]
    NonNegativeAlpha(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A precondition demanded a convex curve and the curvature is not positive.
    #[error("curve is not convex: minimum curvature {min_kappa:e}")]
    ConvexityViolation { min_kappa: f64 },

    /// Convexity dropped below the configured floor during a step.
    #[error("convexity lost: minimum curvature {min_kappa:e} below floor {floor:e}")]
    ConvexityLost { min_kappa: f64, floor: f64 },

    #[error("curvature blow-up: maximum curvature {max_kappa:e} above ceiling {ceiling:e}")]
    CurvatureBlowUp { max_kappa: f64, ceiling: f64 },

    #[error("time step underflow: dt = {0:e}")]
    StepUnderflow(f64),

    #[error("isoperimetric deficit is negative ({0:e}); input is not a convex closed curve")]
    NegativeDeficit(f64),

    #[error("recentering failed: {0}")]
    RecenterFailed(String),

    #[error("root finding did not converge at theta = {0}")]
    RootNotFound(f64),

    #[error("decay fit rejected: {0}")]
    DecayFit(String),
}
