use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::validate_grid_size;

/// Which global quantity the nonlocal term keeps fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(rename = "area")]
    AreaPreserving,
    #[serde(rename = "length")]
    LengthPreserving,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::AreaPreserving => "area",
            Mode::LengthPreserving => "length",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "area" | "area-preserving" | "area_preserving" => Ok(Mode::AreaPreserving),
            "length" | "length-preserving" | "length_preserving" => Ok(Mode::LengthPreserving),
            other => Err(format!("unknown mode `{other}` (expected `area` or `length`)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub alpha: f64,
    pub mode: Mode,
    pub n: usize,
    pub cfl_safety: f64,
    pub t_end: f64,
    pub blowup_kappa: f64,
    pub convexity_floor: f64,
    pub convergence_deficit: f64,
    /// Recenter when `max|ρ_θ| / min sinh ρ` exceeds this.
    pub recenter_trigger: f64,
    pub snapshot_interval: f64,
    /// Highest Fourier mode recorded in the diagnostics series.
    pub k_max: usize,
}

impl FlowConfig {
    pub const DEFAULT_CFL_SAFETY: f64 = 0.2;
    pub const DEFAULT_T_END: f64 = 1000.0;
    pub const DEFAULT_BLOWUP_KAPPA: f64 = 1e4;
    pub const DEFAULT_CONVEXITY_FLOOR: f64 = 1e-8;
    pub const DEFAULT_CONVERGENCE_DEFICIT: f64 = 1e-10;
    pub const DEFAULT_RECENTER_TRIGGER: f64 = 0.5;
    pub const DEFAULT_SNAPSHOT_INTERVAL: f64 = 10.0;
    pub const DEFAULT_K_MAX: usize = 8;

    pub fn new(alpha: f64, mode: Mode, n: usize) -> Result<Self> {
        let config = Self {
            alpha,
            mode,
            n,
            cfl_safety: Self::DEFAULT_CFL_SAFETY,
            t_end: Self::DEFAULT_T_END,
            blowup_kappa: Self::DEFAULT_BLOWUP_KAPPA,
            convexity_floor: Self::DEFAULT_CONVEXITY_FLOOR,
            convergence_deficit: Self::DEFAULT_CONVERGENCE_DEFICIT,
            recenter_trigger: Self::DEFAULT_RECENTER_TRIGGER,
            snapshot_interval: Self::DEFAULT_SNAPSHOT_INTERVAL,
            k_max: Self::DEFAULT_K_MAX.min((n / 2).saturating_sub(1)),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha >= 0.0 {
            return Err(Error::NonNegativeAlpha(self.alpha));
        }
        validate_grid_size(self.n)?;
        let positive = |name: &'static str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        };
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "cfl_safety",
                reason: format!("must lie in (0, 1], got {}", self.cfl_safety),
            });
        }
        positive("t_end", self.t_end)?;
        positive("blowup_kappa", self.blowup_kappa)?;
        positive("convexity_floor", self.convexity_floor)?;
        positive("convergence_deficit", self.convergence_deficit)?;
        positive("recenter_trigger", self.recenter_trigger)?;
        positive("snapshot_interval", self.snapshot_interval)?;
        if self.k_max >= self.n / 2 {
            return Err(Error::InvalidParameter {
                name: "k_max",
                reason: format!("must be below n/2 = {}, got {}", self.n / 2, self.k_max),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_regime_alpha_and_grids() {
        assert!(matches!(
            FlowConfig::new(0.5, Mode::AreaPreserving, 64),
            Err(Error::NonNegativeAlpha(_))
        ));
        assert!(FlowConfig::new(0.0, Mode::AreaPreserving, 64).is_err());
        assert!(matches!(
            FlowConfig::new(-1.0, Mode::AreaPreserving, 100),
            Err(Error::InvalidGridSize(100))
        ));
        assert!(FlowConfig::new(-1.0, Mode::AreaPreserving, 8).is_err());
        let mut c = FlowConfig::new(-1.0, Mode::LengthPreserving, 16).unwrap();
        c.cfl_safety = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("area".parse::<Mode>().unwrap(), Mode::AreaPreserving);
        assert_eq!("Length".parse::<Mode>().unwrap(), Mode::LengthPreserving);
        assert!("volume".parse::<Mode>().is_err());
        assert_eq!(Mode::LengthPreserving.to_string(), "length");
    }
}
