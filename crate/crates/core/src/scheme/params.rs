use std::fmt;
use std::sync::Arc;

use crate::error::SchemeError;
use crate::geometry::Point;
use crate::operators::{check_beta, TensorSpec};
use crate::solver::NewtonConfig;

/// Exterior potential `V`.
#[derive(Clone)]
pub struct Potential(Arc<dyn Fn(Point) -> f64 + Send + Sync>);

impl Potential {
    pub fn new(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0)
    }

    pub fn eval(&self, x: Point) -> f64 {
        (self.0)(x)
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential(..)")
    }
}

#[derive(Debug, Clone)]
pub struct SchemeParams {
    pub dt: f64,
    pub t_final: f64,
    pub kappa: f64,
    pub beta: f64,
    pub lambda: TensorSpec,
    pub potential: Potential,
    /// Shift the projected potential so that its minimum is zero.
    pub shift_potential: bool,
    pub newton: NewtonConfig,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            t_final: 1.0,
            kappa: 0.0,
            beta: 1.0,
            lambda: TensorSpec::Identity,
            potential: Potential::zero(),
            shift_potential: false,
            newton: NewtonConfig::default(),
        }
    }
}

impl SchemeParams {
    pub fn validate(&self) -> Result<(), SchemeError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SchemeError::BadParameter(format!("time step {} must be positive", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(SchemeError::BadParameter(format!("final time {} must be positive", self.t_final)));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(SchemeError::BadParameter(format!("kappa {} must be nonnegative", self.kappa)));
        }
        check_beta(self.beta)?;
        self.lambda.validate()?;
        self.newton.validate().map_err(SchemeError::BadParameter)?;
        Ok(())
    }

    /// `N_T = ⌊T/Δt⌋` (at least one step).
    pub fn n_steps(&self) -> usize {
        ((self.t_final / self.dt + 1e-9).floor() as usize).max(1)
    }

    /// Time step actually used, `T / N_T`.
    pub fn effective_dt(&self) -> f64 {
        self.t_final / self.n_steps() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_count_rounds_down() {
        let p = SchemeParams {
            dt: 4e-3,
            t_final: 0.25,
            ..Default::default()
        };
        assert_eq!(p.n_steps(), 62);
        assert!((p.effective_dt() - 4.032e-3).abs() < 1e-6);
        let p = SchemeParams {
            dt: 1e-3,
            t_final: 2.0,
            ..Default::default()
        };
        assert_eq!(p.n_steps(), 2000);
    }

    #[test]
    fn validation() {
        assert!(SchemeParams::default().validate().is_ok());
        let bad = SchemeParams {
            beta: 3.0,
            ..Default::default()
        };
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("(0,2)"), "{msg}");
        assert!(SchemeParams { kappa: -1.0, ..Default::default() }.validate().is_err());
        assert!(SchemeParams { dt: 0.0, ..Default::default() }.validate().is_err());
    }
}
